"""Evaluation metrics for calibrated robustness monitors.

A monitor's interval predicts the sign of the robustness at a state:
positive interval means satisfied, negative means violated, an interval
straddling zero is an uncertain verdict.  The metrics compare these
verdicts with the ground-truth labels and measure how well the intervals
track the empirical robustness distribution.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .conformal import PredictionInterval
from .quantiles import empirical_quantile

CSV_COLUMNS = (
    "correct",
    "uncertain",
    "wrong",
    "false_positive",
    "coverage",
    "efficiency",
    "eqr_width",
)


@dataclass(frozen=True)
class Metrics:
    correct: float          # percentages; correct + uncertain + wrong = 100
    uncertain: float
    wrong: float
    false_positive: float
    coverage: float         # percentage of (state, sample) pairs inside CPI
    efficiency: float       # mean CPI width
    eqr_width: float        # mean empirical (1 - alpha) quantile-range width

    def __post_init__(self):
        if abs(self.correct + self.uncertain + self.wrong - 100.0) > 0.01:
            raise ValueError("correct + uncertain + wrong must equal 100")
        if not (0.0 <= self.coverage <= 100.0) or self.efficiency < 0:
            raise ValueError("coverage out of [0, 100] or negative efficiency")

    def csv_row(self) -> str:
        return ",".join(
            format(getattr(self, c), ".6f") for c in CSV_COLUMNS
        )


def predicted_sign(pi: PredictionInterval, zero: float = 0.0) -> int:
    """+1 if the interval is strictly positive, -1 if strictly negative,
    else 0.  An endpoint exactly at zero counts as straddling because zero
    robustness is sign-indeterminate."""
    if pi.collapsed:
        if pi.lo > zero:
            return 1
        return -1 if pi.lo < zero else 0
    if pi.lo > zero:
        return 1
    if pi.hi < zero:
        return -1
    return 0


def classify(pi: PredictionInterval, label: int, zero: float = 0.0):
    """Verdict category and false-positive flag for one state.

    Categories: correct (p = label), uncertain (p = 0, label != 0), wrong
    (p != 0 and p != label; this includes label = 0 with a signed
    prediction).  False positive: p = +1 while the label is -1 or 0.
    """
    p = predicted_sign(pi, zero)
    fp = p == 1 and label in (-1, 0)
    if p == label:
        return "correct", fp
    if p == 0:
        return "uncertain", fp
    return "wrong", fp


def coverage(cpis: Sequence[PredictionInterval], R) -> float:
    """Percentage of (state, sample) robustness pairs inside the state's CPI."""
    R = np.atleast_2d(np.asarray(R, dtype=float))
    if len(cpis) != R.shape[0]:
        raise ValueError("one interval per state required")
    hits = 0
    for pi, samples in zip(cpis, R):
        hits += int(np.count_nonzero((samples >= pi.lo) & (samples <= pi.hi)))
    return 100.0 * hits / R.size


def efficiency(cpis: Sequence[PredictionInterval]) -> float:
    """Mean interval width (collapsed intervals count as width 0)."""
    return float(np.mean([pi.width for pi in cpis]))


def eqr_width(R, alpha: float) -> float:
    """Mean per-state width of the empirical [alpha/2, 1 - alpha/2] range."""
    R = np.atleast_2d(np.asarray(R, dtype=float))
    widths = [
        empirical_quantile(row, 1 - alpha / 2) - empirical_quantile(row, alpha / 2)
        for row in R
    ]
    return float(np.mean(widths))


def compute_metrics(
    cpis: Sequence[PredictionInterval],
    labels,
    R,
    alpha: float,
    zero: float = 0.0,
) -> Metrics:
    """All metrics for one test set.

    zero is the sign threshold in whatever space the intervals live in;
    with targets scaled affinely, passing the image of raw robustness 0
    makes the verdicts identical to classifying in raw space.
    """
    labels = np.asarray(labels, dtype=int)
    if not (len(cpis) == labels.size):
        raise ValueError("one interval and label per state required")
    counts = {"correct": 0, "uncertain": 0, "wrong": 0}
    fps = 0
    for pi, label in zip(cpis, labels):
        cat, fp = classify(pi, int(label), zero)
        counts[cat] += 1
        fps += int(fp)
    n = labels.size
    return Metrics(
        correct=100.0 * counts["correct"] / n,
        uncertain=100.0 * counts["uncertain"] / n,
        wrong=100.0 * counts["wrong"] / n,
        false_positive=100.0 * fps / n,
        coverage=coverage(cpis, R),
        efficiency=efficiency(cpis),
        eqr_width=eqr_width(R, alpha),
    )
