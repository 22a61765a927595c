"""Independent naive STL evaluator used as an oracle in tests.

Deliberately written as a literal transcription of the semantics, with no
memoization and full enumeration of t' and t'' in the Until rule.  Keep it
independent of stlmon.stl.semantics.
"""

import math

from stlmon.stl.formula import (
    And,
    Atom,
    Eventually,
    Globally,
    Not,
    Or,
    TrueFormula,
    Until,
)


def naive_robustness(phi, states, t):
    if isinstance(phi, TrueFormula):
        return math.inf
    if isinstance(phi, Atom):
        return phi.value(states[t])
    if isinstance(phi, Not):
        return -naive_robustness(phi.child, states, t)
    if isinstance(phi, And):
        return min(naive_robustness(phi.left, states, t), naive_robustness(phi.right, states, t))
    if isinstance(phi, Or):
        return max(naive_robustness(phi.left, states, t), naive_robustness(phi.right, states, t))
    if isinstance(phi, Eventually):
        return max(
            naive_robustness(phi.child, states, tp) for tp in range(t + phi.a, t + phi.b + 1)
        )
    if isinstance(phi, Globally):
        return min(
            naive_robustness(phi.child, states, tp) for tp in range(t + phi.a, t + phi.b + 1)
        )
    if isinstance(phi, Until):
        candidates = []
        for tp in range(t + phi.a, t + phi.b + 1):
            inner = min(naive_robustness(phi.left, states, tpp) for tpp in range(t, tp + 1))
            candidates.append(min(naive_robustness(phi.right, states, tp), inner))
        return max(candidates)
    raise TypeError(type(phi))


def naive_sat(phi, states, t):
    if isinstance(phi, TrueFormula):
        return True
    if isinstance(phi, Atom):
        return phi.value(states[t]) > 0
    if isinstance(phi, Not):
        return not naive_sat(phi.child, states, t)
    if isinstance(phi, And):
        return naive_sat(phi.left, states, t) and naive_sat(phi.right, states, t)
    if isinstance(phi, Or):
        return naive_sat(phi.left, states, t) or naive_sat(phi.right, states, t)
    if isinstance(phi, Eventually):
        return any(naive_sat(phi.child, states, tp) for tp in range(t + phi.a, t + phi.b + 1))
    if isinstance(phi, Globally):
        return all(naive_sat(phi.child, states, tp) for tp in range(t + phi.a, t + phi.b + 1))
    if isinstance(phi, Until):
        for tp in range(t + phi.a, t + phi.b + 1):
            if naive_sat(phi.right, states, tp) and all(
                naive_sat(phi.left, states, tpp) for tpp in range(t, tp + 1)
            ):
                return True
        return False
    raise TypeError(type(phi))


def random_formula(rng, dim, depth, max_bound=4):
    """Random formula of nesting depth <= depth over `dim` state variables."""
    if depth == 0:
        coeffs = rng.uniform(-2, 2, size=dim)
        const = rng.uniform(-2, 2)
        return Atom(coeffs=tuple(coeffs), const=float(const))
    kind = rng.integers(0, 6)
    if kind == 0:
        return Not(random_formula(rng, dim, depth - 1, max_bound))
    if kind == 1:
        return And(
            random_formula(rng, dim, depth - 1, max_bound),
            random_formula(rng, dim, depth - 1, max_bound),
        )
    if kind == 2:
        return Or(
            random_formula(rng, dim, depth - 1, max_bound),
            random_formula(rng, dim, depth - 1, max_bound),
        )
    a = int(rng.integers(0, max_bound))
    b = int(rng.integers(a, max_bound + 1))
    if kind == 3:
        return Eventually(random_formula(rng, dim, depth - 1, max_bound), a, b)
    if kind == 4:
        return Globally(random_formula(rng, dim, depth - 1, max_bound), a, b)
    return Until(
        random_formula(rng, dim, depth - 1, max_bound),
        random_formula(rng, dim, depth - 1, max_bound),
        a,
        b,
    )
