"""STL formula AST and trajectories.

Formulas are immutable trees.  Temporal bounds are discrete time steps
(integer indices into a trajectory), not seconds.  Atoms are normalized to
the single form ``g(state) > 0`` where g is either an affine map
(coefficients + constant) or a user-registered scalar function.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np


class Formula:
    """Base class for STL formula nodes."""

    __slots__ = ()

    def horizon(self) -> int:
        """Minimal L such that evaluation at t=0 reads only indices 0..L."""
        raise NotImplementedError

    def __and__(self, other):
        return And(self, other)

    def __or__(self, other):
        return Or(self, other)

    def __invert__(self):
        return Not(self)


@dataclass(frozen=True)
class TrueFormula(Formula):
    def horizon(self):
        return 0

    def __str__(self):
        return "true"


@dataclass(frozen=True)
class Atom(Formula):
    """Atomic proposition g(state) > 0.

    Affine atoms carry ``coeffs`` (one per state dimension) and ``const``:
    g(s) = coeffs . s + const.  Nonlinear atoms carry a named ``func``
    instead; the name is used for printing and round-tripping.
    """

    coeffs: Optional[tuple] = None
    const: float = 0.0
    func: Optional[Callable] = None
    name: Optional[str] = None
    # Original surface text, kept so pretty-printing round-trips.
    text: Optional[str] = None

    def __post_init__(self):
        if (self.coeffs is None) == (self.func is None):
            raise ValueError("Atom needs exactly one of coeffs or func")
        if self.coeffs is not None:
            object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))

    def value(self, state) -> float:
        if self.func is not None:
            return float(self.func(state))
        return float(np.dot(self.coeffs, state) + self.const)

    def horizon(self):
        return 0

    def __str__(self):
        if self.text is not None:
            return self.text
        if self.func is not None:
            return f"{self.name or 'fn'} > 0"
        terms = " + ".join(f"{c!r}*x{i}" for i, c in enumerate(self.coeffs) if c != 0.0)
        return f"{terms or '0'} + {self.const!r} > 0"


@dataclass(frozen=True)
class Not(Formula):
    child: Formula

    def horizon(self):
        return self.child.horizon()

    def __str__(self):
        return f"not ({self.child})"


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula

    def horizon(self):
        return max(self.left.horizon(), self.right.horizon())

    def __str__(self):
        return f"({self.left}) and ({self.right})"


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula

    def horizon(self):
        return max(self.left.horizon(), self.right.horizon())

    def __str__(self):
        return f"({self.left}) or ({self.right})"


def _check_bounds(a, b):
    if not (isinstance(a, int) and isinstance(b, int)):
        raise TypeError("interval bounds must be integers")
    if a < 0 or b < 0:
        raise ValueError(f"interval bounds must be nonnegative, got [{a},{b}]")
    if a > b:
        raise ValueError(f"interval with a > b: [{a},{b}]")


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula
    a: int
    b: int

    def __post_init__(self):
        _check_bounds(self.a, self.b)

    def horizon(self):
        return self.b + max(self.left.horizon(), self.right.horizon())

    def __str__(self):
        return f"({self.left}) U[{self.a},{self.b}] ({self.right})"


@dataclass(frozen=True)
class Eventually(Formula):
    child: Formula
    a: int
    b: int

    def __post_init__(self):
        _check_bounds(self.a, self.b)

    def horizon(self):
        return self.b + self.child.horizon()

    def __str__(self):
        return f"F[{self.a},{self.b}] ({self.child})"


@dataclass(frozen=True)
class Globally(Formula):
    child: Formula
    a: int
    b: int

    def __post_init__(self):
        _check_bounds(self.a, self.b)

    def horizon(self):
        return self.b + self.child.horizon()

    def __str__(self):
        return f"G[{self.a},{self.b}] ({self.child})"


def horizon(phi: Formula) -> int:
    return phi.horizon()


@dataclass(frozen=True)
class Trajectory:
    """Fixed-length discrete-time signal: states has shape (H_len, n)."""

    states: np.ndarray
    dt: float = 1.0

    def __post_init__(self):
        states = np.asarray(self.states, dtype=float)
        if states.ndim == 1:
            states = states.reshape(-1, 1)
        if states.ndim != 2 or states.shape[0] < 1:
            raise ValueError("trajectory states must be a (H_len, n) matrix with H_len >= 1")
        if not np.all(np.isfinite(states)):
            raise ValueError("trajectory contains non-finite entries")
        states.setflags(write=False)
        object.__setattr__(self, "states", states)

    @property
    def length(self) -> int:
        return self.states.shape[0]

    @property
    def dim(self) -> int:
        return self.states.shape[1]
