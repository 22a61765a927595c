"""Boolean and quantitative STL semantics over discrete-time trajectories.

sup/inf over dense intervals are instantiated as max/min over integer time
indices.  Evaluation memoizes per (subformula, time index), so the worst
case cost is O(|phi| * H^2) from the Until recursion.
"""

from __future__ import annotations

import numpy as np

from .formula import (
    And,
    Atom,
    Eventually,
    Formula,
    Globally,
    Not,
    Or,
    Trajectory,
    TrueFormula,
    Until,
)


class HorizonError(ValueError):
    """The formula looks past the end of the trajectory."""


def _check_horizon(phi: Formula, traj: Trajectory, t: int):
    if t < 0:
        raise ValueError(f"negative time index {t}")
    need = t + phi.horizon()
    if need > traj.length - 1:
        raise HorizonError(
            f"formula horizon {phi.horizon()} at t={t} needs index {need}, "
            f"but trajectory has length {traj.length}"
        )


def robustness(phi: Formula, traj: Trajectory, t: int = 0) -> float:
    """Quantitative robustness R_phi(traj, t)."""
    _check_horizon(phi, traj, t)
    return _rob(phi, traj.states, t, {})


def _rob(phi, states, t, cache):
    key = (id(phi), t)
    if key in cache:
        return cache[key]

    if isinstance(phi, TrueFormula):
        val = np.inf
    elif isinstance(phi, Atom):
        val = phi.value(states[t])
    elif isinstance(phi, Not):
        val = -_rob(phi.child, states, t, cache)
    elif isinstance(phi, And):
        val = min(_rob(phi.left, states, t, cache), _rob(phi.right, states, t, cache))
    elif isinstance(phi, Or):
        val = max(_rob(phi.left, states, t, cache), _rob(phi.right, states, t, cache))
    elif isinstance(phi, Eventually):
        val = max(_rob(phi.child, states, tp, cache) for tp in range(t + phi.a, t + phi.b + 1))
    elif isinstance(phi, Globally):
        val = min(_rob(phi.child, states, tp, cache) for tp in range(t + phi.a, t + phi.b + 1))
    elif isinstance(phi, Until):
        # sup over t' of min(R2(t'), inf over t'' in [t, t'] of R1(t'')),
        # with the running inf carried along as t' advances.
        best = -np.inf
        running_min = np.inf
        for tpp in range(t, t + phi.a):
            running_min = min(running_min, _rob(phi.left, states, tpp, cache))
        for tp in range(t + phi.a, t + phi.b + 1):
            running_min = min(running_min, _rob(phi.left, states, tp, cache))
            best = max(best, min(_rob(phi.right, states, tp, cache), running_min))
        val = best
    else:
        raise TypeError(f"unknown formula node {type(phi).__name__}")

    cache[key] = val
    return val


def boolean_sat(phi: Formula, traj: Trajectory, t: int = 0) -> bool:
    """Boolean satisfaction (traj, t) |= phi."""
    _check_horizon(phi, traj, t)
    return _sat(phi, traj.states, t, {})


def _sat(phi, states, t, cache):
    key = (id(phi), t)
    if key in cache:
        return cache[key]

    if isinstance(phi, TrueFormula):
        val = True
    elif isinstance(phi, Atom):
        val = phi.value(states[t]) > 0
    elif isinstance(phi, Not):
        val = not _sat(phi.child, states, t, cache)
    elif isinstance(phi, And):
        val = _sat(phi.left, states, t, cache) and _sat(phi.right, states, t, cache)
    elif isinstance(phi, Or):
        val = _sat(phi.left, states, t, cache) or _sat(phi.right, states, t, cache)
    elif isinstance(phi, Eventually):
        val = any(_sat(phi.child, states, tp, cache) for tp in range(t + phi.a, t + phi.b + 1))
    elif isinstance(phi, Globally):
        val = all(_sat(phi.child, states, tp, cache) for tp in range(t + phi.a, t + phi.b + 1))
    elif isinstance(phi, Until):
        val = False
        for tp in range(t + phi.a, t + phi.b + 1):
            if _sat(phi.right, states, tp, cache) and all(
                _sat(phi.left, states, tpp, cache) for tpp in range(t, tp + 1)
            ):
                val = True
                break
    else:
        raise TypeError(f"unknown formula node {type(phi).__name__}")

    cache[key] = val
    return val
