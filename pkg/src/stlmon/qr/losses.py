"""Pinball (check) loss and the three-quantile joint training loss."""

from __future__ import annotations

import numpy as np


def pinball_loss(alpha: float, y, yhat):
    """alpha * max(y - yhat, 0) + (1 - alpha) * max(yhat - y, 0), elementwise."""
    if not (0.0 < alpha < 1.0):
        raise ValueError("pinball level must lie in (0, 1)")
    y = np.asarray(y, dtype=float)
    yhat = np.asarray(yhat, dtype=float)
    return alpha * np.maximum(y - yhat, 0.0) + (1.0 - alpha) * np.maximum(yhat - y, 0.0)


def pinball_grad(alpha: float, y, yhat):
    """Subgradient of the pinball loss in yhat; -alpha on the tie."""
    y = np.asarray(y, dtype=float)
    yhat = np.asarray(yhat, dtype=float)
    return np.where(yhat > y, 1.0 - alpha, -alpha)


def quantile_levels(alpha: float):
    """The three learned levels (alpha/2, 0.5, 1 - alpha/2) for miscoverage alpha."""
    if not (0.0 < alpha < 1.0):
        raise ValueError("alpha must lie in (0, 1)")
    return (alpha / 2.0, 0.5, 1.0 - alpha / 2.0)


def joint_loss(alpha: float, y, preds):
    """Mean of the pinball losses of the (lo, median, hi) heads.

    preds is a length-3 sequence or an (n, 3) array of raw head outputs;
    returns per-example losses (scalar input gives a scalar).
    """
    preds = np.asarray(preds, dtype=float)
    lo, med, hi = quantile_levels(alpha)
    return (
        pinball_loss(lo, y, preds[..., 0])
        + pinball_loss(0.5, y, preds[..., 1])
        + pinball_loss(hi, y, preds[..., 2])
    ) / 3.0
