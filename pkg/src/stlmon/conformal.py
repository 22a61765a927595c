"""Conformalized quantile regression and the split CP regression baseline.

The quantile regressor's interval [q_lo(x), q_hi(x)] has no finite-sample
guarantee on its own.  Calibration computes the two-sided nonconformity
score E_i = max(q_lo(x_i) - y_i, y_i - q_hi(x_i)) on held-out data and the
critical value tau as the (1 - alpha)(1 + 1/m) empirical quantile of the
scores; widening both interval ends by tau yields marginal coverage of at
least 1 - alpha.  tau can be negative, in which case the calibrated
interval is strictly inside the raw one.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np

from .datagen import fmt
from .qr.network import QRModel, predict_batch
from .quantiles import QUANTILE_CONVENTION, empirical_quantile


@dataclass(frozen=True)
class PredictionInterval:
    lo: float
    hi: float
    calibrated: bool = False
    collapsed: bool = False

    def __post_init__(self):
        if not self.collapsed and self.lo > self.hi:
            raise ValueError(f"interval [{self.lo}, {self.hi}] is inverted")

    @property
    def width(self) -> float:
        return 0.0 if self.collapsed else self.hi - self.lo

    def contains(self, y: float) -> bool:
        return (not self.collapsed) and self.lo <= y <= self.hi


@dataclass(frozen=True)
class CalibrationResult:
    tau: float
    alpha: float
    n_calibration: int     # number of calibration states |Z_c|
    scores: np.ndarray     # all |Z_c| * M scores, retained for audit

    def __post_init__(self):
        object.__setattr__(
            self, "scores", np.asarray(self.scores, dtype=float)
        )
        self.scores.setflags(write=False)


def nonconformity_scores(model: QRModel, cal_set, scaler=None) -> np.ndarray:
    """CQR scores for every (state, robustness sample) pair.

    Each record contributes M scores; order is record-then-sample.  If a
    scaler is given the states and targets are mapped into the model's
    scaled space first (and the scaler must be the one the model was
    trained with).
    """
    X = cal_set.states()
    R = cal_set.robustness_matrix()
    if scaler is not None:
        if model.scaling_hash and scaler.train_hash != model.scaling_hash:
            raise ValueError("scaler does not match the one used in training")
        X = scaler.transform_states(X)
        R = scaler.transform_targets(R)
    q = predict_batch(model, X)
    lo, hi = q[:, 0:1], q[:, 2:3]
    scores = np.maximum(lo - R, R - hi)
    return scores.reshape(-1)


def critical_value(scores, alpha: float) -> float:
    """tau = the (1 - alpha)(1 + 1/m) empirical quantile of the scores.

    Levels above 1 (small m) fall back to the maximum score, which is the
    conservative choice.
    """
    scores = np.asarray(scores, dtype=float)
    if scores.size == 0:
        raise ValueError("critical_value needs at least one score")
    m = scores.size
    level = (1.0 - alpha) * (1.0 + 1.0 / m)
    if level >= 1.0:
        return float(scores.max())
    return empirical_quantile(scores, level)


def calibrate(model: QRModel, cal_set, scaler=None) -> CalibrationResult:
    """Compute the CQR critical value on a labeled calibration set."""
    scores = nonconformity_scores(model, cal_set, scaler)
    tau = critical_value(scores, cal_set.alpha)
    return CalibrationResult(
        tau=tau, alpha=cal_set.alpha, n_calibration=len(cal_set), scores=scores
    )


def conformalize(pi: PredictionInterval, tau: float) -> PredictionInterval:
    """Widen (or shrink, for negative tau) both interval ends by tau.

    If shrinking inverts the interval, a width-zero interval collapsed at
    the midpoint is returned and flagged.
    """
    if pi.calibrated:
        raise ValueError("interval is already calibrated")
    lo, hi = pi.lo - tau, pi.hi + tau
    if lo > hi:
        mid = (pi.lo + pi.hi) / 2.0
        return PredictionInterval(mid, mid, calibrated=True, collapsed=True)
    return PredictionInterval(lo, hi, calibrated=True)


def cp_regression_baseline(
    model: QRModel, cal_set, alpha: float, X_query, scaler=None
):
    """Split CP for regression around the median head: f(x) +- beta.

    beta is the floor(alpha * (m + 1))-th largest absolute residual on the
    calibration pairs, so every queried state gets the same interval
    width.  Returns a list of PredictionInterval aligned with X_query.
    """
    Xc = cal_set.states()
    R = cal_set.robustness_matrix()
    Xq = np.atleast_2d(np.asarray(X_query, dtype=float))
    if scaler is not None:
        Xc = scaler.transform_states(Xc)
        R = scaler.transform_targets(R)
        Xq = scaler.transform_states(Xq)
    med = predict_batch(model, Xc)[:, 1:2]
    residuals = np.abs(R - med).reshape(-1)
    beta = baseline_critical_value(residuals, alpha)
    centers = predict_batch(model, Xq)[:, 1]
    return [
        PredictionInterval(float(c - beta), float(c + beta), calibrated=True)
        for c in centers
    ]


def baseline_critical_value(residuals, alpha: float) -> float:
    """The floor(alpha * (m + 1))-th largest residual (at least the 1st)."""
    residuals = np.sort(np.asarray(residuals, dtype=float))[::-1]
    if residuals.size == 0:
        raise ValueError("baseline needs at least one residual")
    k = math.floor(alpha * (residuals.size + 1))
    k = min(max(k, 1), residuals.size)
    return float(residuals[k - 1])


# --- calibration file ---


def save_calibration(result: CalibrationResult, path):
    body = "\n".join(fmt(s) for s in result.scores) + "\n"
    header = [
        f"# alpha: {fmt(result.alpha)}",
        f"# n_calibration: {result.n_calibration}",
        f"# n_scores: {result.scores.size}",
        f"# quantile_convention: {QUANTILE_CONVENTION}",
        f"# tau: {fmt(result.tau)}",
        f"# sha256: {hashlib.sha256(body.encode()).hexdigest()}",
    ]
    with open(path, "w") as f:
        f.write("\n".join(header) + "\n")
        f.write(body)


def load_calibration(path) -> CalibrationResult:
    meta = {}
    scores = []
    with open(path) as f:
        for line in f:
            line = line.rstrip("\n")
            if line.startswith("#"):
                key, _, value = line[1:].partition(":")
                meta[key.strip()] = value.strip()
            elif line:
                scores.append(float(line))
    if meta["quantile_convention"] != QUANTILE_CONVENTION:
        raise ValueError("calibration file uses an unknown quantile convention")
    body = "\n".join(fmt(s) for s in scores) + "\n"
    if hashlib.sha256(body.encode()).hexdigest() != meta["sha256"]:
        raise ValueError(f"calibration file {path} is corrupt: content hash mismatch")
    result = CalibrationResult(
        tau=float(meta["tau"]),
        alpha=float(meta["alpha"]),
        n_calibration=int(meta["n_calibration"]),
        scores=np.array(scores),
    )
    # audit: the stored tau must be reproducible from the stored scores
    if critical_value(result.scores, result.alpha) != result.tau:
        raise ValueError(f"calibration file {path} fails the tau audit")
    return result
