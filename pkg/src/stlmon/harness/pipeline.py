"""Pipeline stages: generate -> train -> calibrate -> evaluate -> compose.

Every stage is a pure function of (config, seed) plus the artifacts of the
previous stages.  Artifacts carry content hashes in their headers and each
stage verifies that the upstream pieces it consumes belong together, so
mixing files from different runs fails loudly instead of silently.

Sign verdicts are made against raw robustness zero (its image under the
target scaling), while coverage, efficiency and EQR widths are reported in
the scaled target space the regressor works in.  Composition happens in
raw robustness space because the two properties have different target
scalings.
"""

from __future__ import annotations

import os

import numpy as np

from ..compose import combined_intervals, negate, recalibrate_combined, union_monitor
from ..conformal import (
    PredictionInterval,
    calibrate,
    conformalize,
    load_calibration,
    save_calibration,
)
from ..datagen import (
    Dataset,
    LabeledRecord,
    apply_scaler,
    fit_scaler,
    fmt,
    generate_datasets,
    label_state,
    load_dataset,
    save_dataset,
)
from ..metrics import CSV_COLUMNS, compute_metrics
from ..qr import load_model, predict_batch, save_model, train
from ..quantiles import empirical_quantile
from ..rng import STREAM_PLOT, STREAM_SEQUENTIAL, stream
from ..stl import Trajectory, parse_formula, robustness
from .config import ExperimentConfig
from .plots import plot_intervals, plot_sequential

STAGE_ORDER = ("generate", "train", "calibrate", "evaluate", "compose", "sequential")


class StageError(RuntimeError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage}: {cause}")
        self.stage = stage
        self.cause = cause


def _run(stage, fn, *args):
    try:
        return fn(*args)
    except StageError:
        raise
    except Exception as e:
        raise StageError(stage, e) from e


class Paths:
    """Artifact layout inside one results directory."""

    def __init__(self, out: str):
        self.out = out
        self.train = os.path.join(out, "train.csv")
        self.cal = os.path.join(out, "calibration_set.csv")
        self.test = os.path.join(out, "test.csv")
        self.model = os.path.join(out, "model.txt")
        self.calibration = os.path.join(out, "calibration.txt")
        self.metrics = os.path.join(out, "metrics.csv")
        self.plot_data = os.path.join(out, "plot_data.csv")
        self.figure = os.path.join(out, "intervals.png")
        self.train2 = os.path.join(out, "train2.csv")
        self.cal2 = os.path.join(out, "calibration_set2.csv")
        self.test2 = os.path.join(out, "test2.csv")
        self.model2 = os.path.join(out, "model2.txt")
        self.calibration2 = os.path.join(out, "calibration2.txt")
        self.cal_composite = os.path.join(out, "calibration_set_composite.csv")
        self.test_composite = os.path.join(out, "test_composite.csv")
        self.compose_metrics = os.path.join(out, "compose_metrics.csv")
        self.sequential = os.path.join(out, "sequential.csv")
        self.sequential_figure = os.path.join(out, "sequential.png")


def _properties(cfg: ExperimentConfig, model):
    p1 = cfg.property if cfg.property is not None else model.default_property()
    if cfg.property2 is not None and cfg.compose_op in ("and", "or"):
        composite = f"({p1}) {cfg.compose_op} ({cfg.property2})"
        return p1, cfg.property2, composite
    return p1, None, None


# --- stages ---


def stage_generate(cfg: ExperimentConfig, paths: Paths):
    model = cfg.build_model()
    n_train, n_cal, n_test = cfg.resolved_sizes(model)
    p1, p2, composite = _properties(cfg, model)
    phis = [p1] if p2 is None else [p1, p2, composite]

    def gen(n, m, split):
        return generate_datasets(model, phis, n, m, cfg.alpha, cfg.seed, split)

    train_sets = gen(n_train, cfg.m_train, "train")
    cal_sets = gen(n_cal, cfg.m_train, "calibration")
    test_sets = gen(n_test, cfg.m_test, "test")

    save_dataset(train_sets[0], paths.train, fit_scaler(train_sets[0]))
    save_dataset(cal_sets[0], paths.cal)
    save_dataset(test_sets[0], paths.test)
    if p2 is not None:
        save_dataset(train_sets[1], paths.train2, fit_scaler(train_sets[1]))
        save_dataset(cal_sets[1], paths.cal2)
        save_dataset(test_sets[1], paths.test2)
        save_dataset(cal_sets[2], paths.cal_composite)
        save_dataset(test_sets[2], paths.test_composite)


def _train_one(cfg, train_path, model_path):
    train_set, scaler = load_dataset(train_path)
    if scaler is None:
        raise ValueError(f"{train_path} has no scaling header")
    model = train(train_set, cfg.train_config(), scaler)
    save_model(model, model_path)


def stage_train(cfg: ExperimentConfig, paths: Paths):
    _train_one(cfg, paths.train, paths.model)
    if os.path.exists(paths.train2):
        _train_one(cfg, paths.train2, paths.model2)


def _calibrate_one(train_path, model_path, cal_path, calibration_path):
    _, scaler = load_dataset(train_path)
    model = load_model(model_path)
    cal_set, _ = load_dataset(cal_path)
    result = calibrate(model, cal_set, scaler)
    save_calibration(result, calibration_path)


def stage_calibrate(cfg: ExperimentConfig, paths: Paths):
    _calibrate_one(paths.train, paths.model, paths.cal, paths.calibration)
    if os.path.exists(paths.train2):
        _calibrate_one(paths.train2, paths.model2, paths.cal2, paths.calibration2)


def _load_monitor(train_path, model_path, calibration_path):
    _, scaler = load_dataset(train_path)
    model = load_model(model_path)
    if model.scaling_hash != scaler.train_hash:
        raise ValueError("model checkpoint does not match the training data scaling")
    result = load_calibration(calibration_path)
    return model, scaler, result


def monitor_intervals(model, scaler, tau, X_raw):
    """Raw-head and calibrated intervals in scaled space for raw states."""
    q = predict_batch(model, apply_scaler(X_raw, scaler))
    pis = [PredictionInterval(float(lo), float(hi)) for lo, _, hi in q]
    cpis = [conformalize(pi, tau) for pi in pis]
    return q, pis, cpis


def stage_evaluate(cfg: ExperimentConfig, paths: Paths):
    model, scaler, result = _load_monitor(paths.train, paths.model, paths.calibration)
    test_set, _ = load_dataset(paths.test)
    q, pis, cpis = monitor_intervals(model, scaler, result.tau, test_set.states())
    R_scaled = scaler.transform_targets(test_set.robustness_matrix())
    metrics = compute_metrics(
        cpis, test_set.labels(), R_scaled, cfg.alpha, zero=scaler.target_zero
    )
    with open(paths.metrics, "w") as f:
        f.write(",".join(CSV_COLUMNS) + "\n")
        f.write(metrics.csv_row() + "\n")

    # plot data for a random subset of test states
    rng = stream(cfg.seed, STREAM_PLOT)
    n_plot = min(cfg.n_plot_states, len(test_set))
    chosen = np.sort(rng.choice(len(test_set), size=n_plot, replace=False))
    rows = []
    for idx in chosen:
        samples = R_scaled[idx]
        rows.append({
            "state_index": int(idx),
            "label": int(test_set.labels()[idx]),
            "eqr_lo": empirical_quantile(samples, cfg.alpha / 2),
            "eqr_hi": empirical_quantile(samples, 1 - cfg.alpha / 2),
            "emp_med": empirical_quantile(samples, 0.5),
            "pi_lo": pis[idx].lo,
            "pi_hi": pis[idx].hi,
            "cpi_lo": cpis[idx].lo,
            "cpi_hi": cpis[idx].hi,
            "q_med": float(q[idx][1]),
        })
    _write_rows(paths.plot_data, rows)
    plot_intervals(
        rows, paths.figure,
        f"{cfg.model}: {test_set.property_text}", zero=scaler.target_zero,
    )
    return metrics


def _write_rows(path, rows):
    keys = list(rows[0].keys())
    with open(path, "w") as f:
        f.write(",".join(keys) + "\n")
        for r in rows:
            f.write(",".join(
                str(r[k]) if isinstance(r[k], int) else fmt(r[k]) for k in keys
            ) + "\n")


def _negated_dataset(ds: Dataset) -> Dataset:
    records = [
        LabeledRecord(r.state, -r.robustness, label_state(-r.robustness, ds.alpha))
        for r in ds.records
    ]
    return Dataset(records, ds.alpha, f"not ({ds.property_text})", ds.split,
                   model_name=ds.model_name, seed=ds.seed)


def _raw_heads(model, scaler, X_raw):
    q = predict_batch(model, apply_scaler(X_raw, scaler))
    return scaler.inverse_targets(q)


def stage_compose(cfg: ExperimentConfig, paths: Paths):
    """Composite monitors without retraining; metrics in raw space."""
    model1, scaler1, result1 = _load_monitor(paths.train, paths.model, paths.calibration)
    rows = []

    if cfg.compose_op == "not":
        test_set, _ = load_dataset(paths.test)
        neg_test = _negated_dataset(test_set)
        _, _, cpis = monitor_intervals(model1, scaler1, result1.tau, test_set.states())
        # negate in raw space; affine maps preserve coverage, not signs
        raw_cpis = [
            negate(PredictionInterval(
                *scaler1.inverse_targets(np.array([c.lo, c.hi])), calibrated=True))
            for c in cpis
        ]
        m = compute_metrics(
            raw_cpis, neg_test.labels(), neg_test.robustness_matrix(), cfg.alpha
        )
        rows.append(("negate", m))
    else:
        model2, scaler2, result2 = _load_monitor(
            paths.train2, paths.model2, paths.calibration2
        )
        cal_comp, _ = load_dataset(paths.cal_composite)
        test_comp, _ = load_dataset(paths.test_composite)

        # recalibrated interval arithmetic, in raw robustness space
        heads1_cal = _raw_heads(model1, scaler1, cal_comp.states())
        heads2_cal = _raw_heads(model2, scaler2, cal_comp.states())
        combined_cal = combined_intervals(
            heads1_cal[:, [0, 2]], heads2_cal[:, [0, 2]], cfg.compose_op
        )
        recal = recalibrate_combined(
            combined_cal, cal_comp.robustness_matrix(), cfg.alpha
        )
        heads1 = _raw_heads(model1, scaler1, test_comp.states())
        heads2 = _raw_heads(model2, scaler2, test_comp.states())
        combined = combined_intervals(
            heads1[:, [0, 2]], heads2[:, [0, 2]], cfg.compose_op
        )
        min_cpis = [
            conformalize(PredictionInterval(float(lo), float(hi)), recal.tau)
            for lo, hi in combined
        ]
        strategy = "min" if cfg.compose_op == "and" else "max"
        rows.append((strategy, compute_metrics(
            min_cpis, test_comp.labels(), test_comp.robustness_matrix(), cfg.alpha
        )))

        # hull of the per-property calibrated intervals, mapped to raw space
        def raw_cpi(heads_scaled_model, scaler, tau, i):
            lo, hi = heads_scaled_model[i]
            pair = scaler.inverse_targets(np.array([lo - tau, hi + tau]))
            if pair[0] > pair[1]:
                mid = pair.mean()
                return PredictionInterval(mid, mid, calibrated=True, collapsed=True)
            return PredictionInterval(pair[0], pair[1], calibrated=True)

        scaled1 = predict_batch(model1, apply_scaler(test_comp.states(), scaler1))
        scaled2 = predict_batch(model2, apply_scaler(test_comp.states(), scaler2))
        union_cpis = [
            union_monitor(
                raw_cpi(scaled1[:, [0, 2]], scaler1, result1.tau, i),
                raw_cpi(scaled2[:, [0, 2]], scaler2, result2.tau, i),
                cfg.alpha, cfg.alpha,
            )
            for i in range(len(test_comp))
        ]
        rows.append(("union", compute_metrics(
            union_cpis, test_comp.labels(), test_comp.robustness_matrix(), cfg.alpha
        )))

    with open(paths.compose_metrics, "w") as f:
        f.write("strategy," + ",".join(CSV_COLUMNS) + "\n")
        for name, m in rows:
            f.write(name + "," + m.csv_row() + "\n")
    return dict(rows)


def stage_sequential(cfg: ExperimentConfig, paths: Paths):
    """Apply the monitor to every state along one sampled trajectory."""
    model, scaler, result = _load_monitor(paths.train, paths.model, paths.calibration)
    process = cfg.build_model()
    p1, _, _ = _properties(cfg, process)
    phi = parse_formula(p1, process.var_names)

    rng = stream(cfg.seed, STREAM_SEQUENTIAL)
    s0 = process.sample_initial_state(rng)
    L = cfg.sequential_length
    visited = process.simulate_one(s0, rng, L - 1)

    rows = []
    for t in range(L):
        state = process.unflatten(visited[t])
        samples = np.empty(cfg.m_test)
        for j in range(cfg.m_test):
            traj_rng = stream(cfg.seed, STREAM_SEQUENTIAL + 1 + t * cfg.m_test + j)
            traj = Trajectory(
                process.simulate_one(state, traj_rng, process.horizon_default),
                dt=process.dt,
            )
            samples[j] = robustness(phi, traj, 0)
        scaled = scaler.transform_targets(samples)
        q, pis, cpis = monitor_intervals(
            model, scaler, result.tau, visited[t : t + 1]
        )
        rows.append({
            "step": t,
            "label": label_state(samples, cfg.alpha),
            "eqr_lo": empirical_quantile(scaled, cfg.alpha / 2),
            "eqr_hi": empirical_quantile(scaled, 1 - cfg.alpha / 2),
            "emp_med": empirical_quantile(scaled, 0.5),
            "pi_lo": pis[0].lo,
            "pi_hi": pis[0].hi,
            "cpi_lo": cpis[0].lo,
            "cpi_hi": cpis[0].hi,
            "q_med": float(q[0][1]),
        })
    _write_rows(paths.sequential, rows)
    plot_sequential(
        rows, paths.sequential_figure,
        f"{cfg.model}: monitor along one trajectory", zero=scaler.target_zero,
    )
    return rows


# --- orchestration ---


def run_experiment(cfg: ExperimentConfig, out: str):
    """generate -> train -> calibrate -> evaluate (-> compose)."""
    os.makedirs(out, exist_ok=True)
    paths = Paths(out)
    _run("generate", stage_generate, cfg, paths)
    _run("train", stage_train, cfg, paths)
    _run("calibrate", stage_calibrate, cfg, paths)
    metrics = _run("evaluate", stage_evaluate, cfg, paths)
    if cfg.property2 is not None or cfg.compose_op == "not":
        _run("compose", stage_compose, cfg, paths)
    return metrics


def run_sequential(cfg: ExperimentConfig, out: str):
    """Train and calibrate if needed, then monitor along one trajectory."""
    os.makedirs(out, exist_ok=True)
    paths = Paths(out)
    if not os.path.exists(paths.calibration):
        _run("generate", stage_generate, cfg, paths)
        _run("train", stage_train, cfg, paths)
        _run("calibrate", stage_calibrate, cfg, paths)
    return _run("sequential", stage_sequential, cfg, paths)
