"""Dataset generation: (state, robustness samples, label) records.

For each sampled state we simulate M trajectories, evaluate the STL
robustness of each at t=0, and label the state safe (+1) / unsafe (-1) /
risky (0) from the empirical alpha/2 and 1-alpha/2 robustness quantiles.

Randomness layout: every split owns a disjoint block of Philox stream ids,
the state sampler uses the first stream of the block and the trajectories
of state i use streams 1 + i*M + j within it, so generation is
reproducible and could fan out over states without changing the output.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from .quantiles import empirical_quantile
from .rng import stream
from .stl import Trajectory, horizon, parse_formula, robustness

SPLIT_INDEX = {"train": 0, "calibration": 1, "test": 2}
_SPLIT_BLOCK = 1 << 40  # stream ids per split

FLOAT_FMT = ".17g"


def fmt(x: float) -> str:
    return format(float(x), FLOAT_FMT)


@dataclass(frozen=True)
class LabeledRecord:
    state: np.ndarray
    robustness: np.ndarray
    label: int

    def __post_init__(self):
        object.__setattr__(self, "state", np.asarray(self.state, dtype=float))
        object.__setattr__(self, "robustness", np.asarray(self.robustness, dtype=float))


@dataclass
class Dataset:
    records: List[LabeledRecord]
    alpha: float
    property_text: str
    split: str
    model_name: str = "?"
    seed: int = 0

    def __post_init__(self):
        if self.split not in SPLIT_INDEX:
            raise ValueError(f"unknown split {self.split!r}")
        dims = {r.state.shape for r in self.records}
        ms = {r.robustness.shape for r in self.records}
        if len(dims) > 1 or len(ms) > 1:
            raise ValueError("records disagree on state dimension or sample count M")

    def __len__(self):
        return len(self.records)

    @property
    def n_samples(self) -> int:
        return self.records[0].robustness.shape[0]

    def states(self) -> np.ndarray:
        return np.stack([r.state for r in self.records])

    def robustness_matrix(self) -> np.ndarray:
        return np.stack([r.robustness for r in self.records])

    def labels(self) -> np.ndarray:
        return np.array([r.label for r in self.records], dtype=int)

    def training_pairs(self):
        """Expand to (state, single sample) pairs: each record yields M pairs."""
        X = np.repeat(self.states(), self.n_samples, axis=0)
        y = self.robustness_matrix().reshape(-1)
        return X, y

    def content_hash(self) -> str:
        return hashlib.sha256(_rows_text(self).encode()).hexdigest()


def label_state(robustness_samples, alpha: float) -> int:
    """+1 iff the empirical alpha/2 quantile is positive, -1 iff the
    1-alpha/2 quantile is negative, else 0 (risky)."""
    q_lo = empirical_quantile(robustness_samples, alpha / 2)
    q_hi = empirical_quantile(robustness_samples, 1 - alpha / 2)
    if q_lo > 0:
        return 1
    if q_hi < 0:
        return -1
    return 0


def generate_dataset(
    model,
    phi,
    n_states: int,
    n_trajectories: int,
    alpha: float,
    seed: int,
    split: str = "train",
    sim_horizon: Optional[int] = None,
) -> Dataset:
    """Sample n_states states, simulate n_trajectories per state and label."""
    phis = phi if isinstance(phi, (list, tuple)) else [phi]
    datasets = generate_datasets(
        model, phis, n_states, n_trajectories, alpha, seed, split, sim_horizon
    )
    return datasets[0] if not isinstance(phi, (list, tuple)) else datasets


def generate_datasets(
    model,
    phis: Sequence,
    n_states: int,
    n_trajectories: int,
    alpha: float,
    seed: int,
    split: str = "train",
    sim_horizon: Optional[int] = None,
) -> List[Dataset]:
    """Like generate_dataset, for several formulas over shared trajectories.

    All formulas are evaluated on the same simulated trajectories, which is
    what monitor composition needs (the composite robustness per trajectory
    then equals the exact min/max of the component robustness values).
    """
    if n_states < 1 or n_trajectories < 1:
        raise ValueError("n_states and n_trajectories must be >= 1")
    if not (0 < alpha < 1):
        raise ValueError("alpha must be in (0, 1)")

    parsed = [
        parse_formula(p, model.var_names) if isinstance(p, str) else p for p in phis
    ]
    texts = [str(p) for p in parsed]
    sim_horizon = sim_horizon if sim_horizon is not None else model.horizon_default
    for p in parsed:
        if horizon(p) > sim_horizon:
            raise ValueError(
                f"formula horizon {horizon(p)} exceeds simulation horizon {sim_horizon}"
            )

    base = SPLIT_INDEX[split] * _SPLIT_BLOCK
    state_rng = stream(seed, base)
    states = [model.sample_initial_state(state_rng) for _ in range(n_states)]

    per_formula = [[] for _ in parsed]
    for i, s0 in enumerate(states):
        flat = model.flatten(s0)
        robs = np.empty((len(parsed), n_trajectories))
        for j in range(n_trajectories):
            rng = stream(seed, base + 1 + i * n_trajectories + j)
            traj = Trajectory(model.simulate_one(s0, rng, sim_horizon), dt=model.dt)
            for k, p in enumerate(parsed):
                robs[k, j] = robustness(p, traj, 0)
        for k in range(len(parsed)):
            per_formula[k].append(
                LabeledRecord(flat, robs[k], label_state(robs[k], alpha))
            )

    return [
        Dataset(
            records=recs,
            alpha=alpha,
            property_text=texts[k],
            split=split,
            model_name=model.name,
            seed=seed,
        )
        for k, recs in enumerate(per_formula)
    ]


# --- scaling ---


@dataclass
class Scaler:
    """Affine map per dimension sending the train min/max to [-1, 1].

    Out-of-range inputs are extended affinely, never clipped.  Constant
    dimensions map to 0 and are flagged degenerate.  Robustness targets get
    the same treatment from the train robustness min/max.
    """

    state_lo: np.ndarray
    state_hi: np.ndarray
    target_lo: float
    target_hi: float
    train_hash: str = ""

    @property
    def state_degenerate(self) -> np.ndarray:
        return self.state_hi == self.state_lo

    @property
    def target_degenerate(self) -> bool:
        return self.target_hi == self.target_lo

    def transform_states(self, X):
        X = np.asarray(X, dtype=float)
        span = np.where(self.state_degenerate, 1.0, self.state_hi - self.state_lo)
        out = -1.0 + 2.0 * (X - self.state_lo) / span
        return np.where(self.state_degenerate, 0.0, out)

    def inverse_states(self, Xs):
        Xs = np.asarray(Xs, dtype=float)
        return self.state_lo + (Xs + 1.0) * (self.state_hi - self.state_lo) / 2.0

    def transform_targets(self, y):
        y = np.asarray(y, dtype=float)
        if self.target_degenerate:
            return np.zeros_like(y)
        return -1.0 + 2.0 * (y - self.target_lo) / (self.target_hi - self.target_lo)

    def inverse_targets(self, ys):
        ys = np.asarray(ys, dtype=float)
        return self.target_lo + (ys + 1.0) * (self.target_hi - self.target_lo) / 2.0

    @property
    def target_zero(self) -> float:
        """Image of raw robustness 0 under the target map."""
        return float(self.transform_targets(np.array([0.0]))[0])


def fit_scaler(train: Dataset) -> Scaler:
    if len(train) == 0:
        raise ValueError("cannot fit a scaler on an empty dataset")
    X = train.states()
    R = train.robustness_matrix()
    return Scaler(
        state_lo=X.min(axis=0),
        state_hi=X.max(axis=0),
        target_lo=float(R.min()),
        target_hi=float(R.max()),
        train_hash=train.content_hash(),
    )


def apply_scaler(X, scaler: Scaler):
    return scaler.transform_states(X)


# --- file format ---


def _rows_text(dataset: Dataset) -> str:
    lines = []
    for r in dataset.records:
        cells = [fmt(v) for v in r.state] + [fmt(v) for v in r.robustness] + [str(r.label)]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def save_dataset(dataset: Dataset, path, scaler: Optional[Scaler] = None):
    """Self-describing text header + CSV rows s_0..s_{n-1}, r_1..r_M, label."""
    rows = _rows_text(dataset)
    header = [
        f"# model: {dataset.model_name}",
        f"# property: {dataset.property_text}",
        f"# alpha: {fmt(dataset.alpha)}",
        f"# split: {dataset.split}",
        f"# n_states: {len(dataset)}",
        f"# n_trajectories: {dataset.n_samples}",
        f"# seed: {dataset.seed}",
        f"# state_dim: {dataset.records[0].state.shape[0]}",
        f"# sha256: {hashlib.sha256(rows.encode()).hexdigest()}",
    ]
    if scaler is not None:
        header += [
            f"# scaling_state_lo: {' '.join(fmt(v) for v in scaler.state_lo)}",
            f"# scaling_state_hi: {' '.join(fmt(v) for v in scaler.state_hi)}",
            f"# scaling_target: {fmt(scaler.target_lo)} {fmt(scaler.target_hi)}",
            f"# scaling_train_hash: {scaler.train_hash}",
        ]
    with open(path, "w") as f:
        f.write("\n".join(header) + "\n")
        f.write(rows)


def load_dataset(path):
    """Load a dataset file; returns (Dataset, Scaler or None)."""
    meta = {}
    records = []
    with open(path) as f:
        for line in f:
            line = line.rstrip("\n")
            if line.startswith("#"):
                key, _, value = line[1:].partition(":")
                meta[key.strip()] = value.strip()
                continue
            if not line:
                continue
            cells = line.split(",")
            dim = int(meta["state_dim"])
            state = np.array([float(c) for c in cells[:dim]])
            rob = np.array([float(c) for c in cells[dim:-1]])
            records.append(LabeledRecord(state, rob, int(cells[-1])))
    dataset = Dataset(
        records=records,
        alpha=float(meta["alpha"]),
        property_text=meta["property"],
        split=meta["split"],
        model_name=meta["model"],
        seed=int(meta["seed"]),
    )
    if dataset.content_hash() != meta["sha256"]:
        raise ValueError(f"dataset file {path} is corrupt: content hash mismatch")
    scaler = None
    if "scaling_state_lo" in meta:
        t_lo, t_hi = meta["scaling_target"].split()
        scaler = Scaler(
            state_lo=np.array([float(v) for v in meta["scaling_state_lo"].split()]),
            state_hi=np.array([float(v) for v in meta["scaling_state_hi"].split()]),
            target_lo=float(t_lo),
            target_hi=float(t_hi),
            train_hash=meta["scaling_train_hash"],
        )
    return dataset, scaler
