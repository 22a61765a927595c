"""Monitor composition for Boolean combinations of properties.

Two strategies, neither of which retrains the regressors:

* union: take the interval hull of the per-property calibrated intervals.
  The hull is the tightest interval superset of the set union (which for
  disjoint intervals is not an interval), so coverage carries over for
  both conjunctions and disjunctions.
* recalibrated interval arithmetic: combine the raw quantile intervals
  componentwise (min for conjunction, max for disjunction), then
  recalibrate the combined interval against composite robustness values
  computed on shared trajectories.
"""

from __future__ import annotations

import numpy as np

from .conformal import CalibrationResult, PredictionInterval, critical_value


def negate(pi: PredictionInterval) -> PredictionInterval:
    """Monitor for the negated property: [lo, hi] becomes [-hi, -lo]."""
    return PredictionInterval(
        -pi.hi, -pi.lo, calibrated=pi.calibrated, collapsed=pi.collapsed
    )


def union_monitor(cpi1: PredictionInterval, cpi2: PredictionInterval,
                  alpha1: float = None, alpha2: float = None) -> PredictionInterval:
    """Interval hull of two calibrated intervals; valid for `and` and `or`.

    If the per-monitor miscoverage levels are supplied they must agree,
    since the hull only inherits a guarantee at a common level.
    """
    if not (cpi1.calibrated and cpi2.calibrated):
        raise ValueError("union_monitor expects calibrated intervals")
    if alpha1 is not None and alpha2 is not None and alpha1 != alpha2:
        raise ValueError(f"miscoverage levels differ: {alpha1} vs {alpha2}")
    return PredictionInterval(
        min(cpi1.lo, cpi2.lo), max(cpi1.hi, cpi2.hi), calibrated=True
    )


def combine_min(q1, q2) -> PredictionInterval:
    """Raw interval for a conjunction: componentwise min of (lo, hi)."""
    return PredictionInterval(min(q1[0], q2[0]), min(q1[1], q2[1]))


def combine_max(q1, q2) -> PredictionInterval:
    """Raw interval for a disjunction: componentwise max of (lo, hi)."""
    return PredictionInterval(max(q1[0], q2[0]), max(q1[1], q2[1]))


def combined_intervals(Q1, Q2, op: str) -> np.ndarray:
    """Vectorized combine over (n, 2) arrays of raw (lo, hi) rows."""
    Q1 = np.asarray(Q1, dtype=float)
    Q2 = np.asarray(Q2, dtype=float)
    if op == "and":
        return np.minimum(Q1, Q2)
    if op == "or":
        return np.maximum(Q1, Q2)
    raise ValueError(f"unknown Boolean op {op!r}; expected 'and' or 'or'")


def recalibrate_combined(
    combined: np.ndarray, composite_R: np.ndarray, alpha: float
) -> CalibrationResult:
    """Critical value for combined raw intervals on composite targets.

    combined holds one raw (lo, hi) row per calibration state; composite_R
    holds the matching composite robustness samples (min or max of the
    componentwise robustness per shared trajectory), shape (n, M).
    """
    combined = np.asarray(combined, dtype=float)
    composite_R = np.asarray(composite_R, dtype=float)
    lo, hi = combined[:, 0:1], combined[:, 1:2]
    scores = np.maximum(lo - composite_R, composite_R - hi).reshape(-1)
    tau = critical_value(scores, alpha)
    return CalibrationResult(
        tau=tau, alpha=alpha, n_calibration=combined.shape[0], scores=scores
    )
