import numpy as np
import pytest

from stlmon.conformal import PredictionInterval
from stlmon.metrics import (
    CSV_COLUMNS,
    Metrics,
    classify,
    compute_metrics,
    coverage,
    efficiency,
    eqr_width,
    predicted_sign,
)


def cpi(lo, hi, collapsed=False):
    return PredictionInterval(lo, hi, calibrated=True, collapsed=collapsed)


def test_classify_examples():
    assert classify(cpi(0.2, 0.5), 1) == ("correct", False)
    assert classify(cpi(-0.1, 0.3), 1) == ("uncertain", False)
    assert classify(cpi(0.1, 0.4), 0) == ("wrong", True)


def test_classify_negative_and_fp_cases():
    assert classify(cpi(-0.5, -0.1), -1) == ("correct", False)
    assert classify(cpi(0.1, 0.4), -1) == ("wrong", True)
    assert classify(cpi(-0.4, -0.1), 1) == ("wrong", False)
    assert classify(cpi(-0.1, 0.1), 0) == ("correct", False)


def test_zero_endpoint_is_straddling():
    assert predicted_sign(cpi(0.0, 0.5)) == 0
    assert predicted_sign(cpi(-0.5, 0.0)) == 0
    assert predicted_sign(cpi(0.1, 0.5)) == 1
    assert predicted_sign(cpi(-0.5, -0.1)) == -1


def test_sign_threshold_shifts_with_zero():
    # classification against the image of raw zero in scaled space
    assert predicted_sign(cpi(0.3, 0.6), zero=0.2) == 1
    assert predicted_sign(cpi(0.3, 0.6), zero=0.4) == 0
    assert predicted_sign(cpi(0.3, 0.6), zero=0.8) == -1


def test_classify_partition():
    rng = np.random.default_rng(0)
    for _ in range(300):
        a, b = np.sort(rng.normal(size=2))
        label = rng.integers(-1, 2)
        cat, _ = classify(cpi(a, b), int(label))
        assert cat in ("correct", "uncertain", "wrong")


def test_coverage_examples():
    intervals = [cpi(-1.0, 1.0), cpi(-2.0, 2.0)]
    R = np.array([[0.0, 0.5], [1.5, -1.5]])
    assert coverage(intervals, R) == 100.0
    point = [cpi(0.3, 0.3, collapsed=True)]
    assert coverage(point, np.array([[0.3, 0.4]])) == 50.0


def test_coverage_order_invariant():
    rng = np.random.default_rng(1)
    intervals = [cpi(*np.sort(rng.normal(size=2))) for _ in range(10)]
    R = rng.normal(size=(10, 20))
    base = coverage(intervals, R)
    perm = rng.permutation(10)
    assert coverage([intervals[i] for i in perm], R[perm]) == base
    assert coverage(intervals, R[:, rng.permutation(20)]) == base


def test_efficiency():
    assert efficiency([cpi(0.0, 1.0)]) == 1.0
    assert efficiency([cpi(0.0, 1.0), cpi(0.5, 0.5, collapsed=True)]) == 0.5


def test_efficiency_grows_by_two_tau():
    rng = np.random.default_rng(2)
    raw = [np.sort(rng.normal(size=2)) for _ in range(30)]
    tau = 0.17
    pis = [cpi(a, b) for a, b in raw]
    cpis = [cpi(a - tau, b + tau) for a, b in raw]
    assert efficiency(cpis) == pytest.approx(efficiency(pis) + 2 * tau)


def test_eqr_width_uniform():
    rng = np.random.default_rng(3)
    R = rng.uniform(0, 1, size=(200, 500))
    assert eqr_width(R, 0.1) == pytest.approx(0.9, abs=0.02)


def test_compute_metrics_and_csv():
    intervals = [cpi(0.2, 0.5), cpi(-0.1, 0.3), cpi(0.1, 0.4), cpi(-0.5, -0.2)]
    labels = [1, 1, 0, -1]
    R = np.array([[0.3, 0.4], [0.0, 0.2], [0.2, 0.3], [-0.4, -0.3]])
    m = compute_metrics(intervals, labels, R, alpha=0.1)
    assert m.correct == 50.0
    assert m.uncertain == 25.0
    assert m.wrong == 25.0
    assert m.false_positive == 25.0
    assert m.coverage == 100.0
    assert m.correct + m.uncertain + m.wrong == 100.0
    row = m.csv_row()
    assert len(row.split(",")) == len(CSV_COLUMNS)
    assert row.split(",")[0] == "50.000000"


def test_metrics_invariants_enforced():
    with pytest.raises(ValueError):
        Metrics(50, 25, 30, 0, 90, 1.0, 1.0)
    with pytest.raises(ValueError):
        Metrics(50, 25, 25, 0, 101, 1.0, 1.0)
