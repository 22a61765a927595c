"""Flat key = value experiment configuration.

Unset dataset sizes default to the benchmark rules N_train = n * 1000,
N_cal = n * 500, N_test = n * 100 with n the number of continuous state
dimensions, M = 50 robustness samples per state for training and
calibration and M_test = 500 for evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Optional

from ..processes import get_model
from ..qr import TrainConfig


@dataclass
class ExperimentConfig:
    model: str = "mrh2"
    property: Optional[str] = None      # defaults to the model's property
    property2: Optional[str] = None     # second property for composition
    compose_op: str = "and"
    alpha: float = 0.1
    n_train: Optional[int] = None
    n_cal: Optional[int] = None
    n_test: Optional[int] = None
    m_train: int = 50
    m_test: int = 500
    learning_rate: float = 5e-4
    epochs: int = 500
    batch_size: int = 512
    dropout_rate: float = 0.1
    seed: int = 0
    n_plot_states: int = 40
    sequential_length: int = 20
    params_path: Optional[str] = None

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise ValueError("alpha must lie in (0, 1)")
        if self.compose_op not in ("and", "or", "not"):
            raise ValueError("compose_op must be and, or, or not")
        if self.m_train < 1 or self.m_test < 1 or self.sequential_length < 1:
            raise ValueError("sample counts and sequential length must be >= 1")

    def build_model(self):
        return get_model(self.model, self.params_path)

    def resolved_sizes(self, process_model):
        n = process_model.n_continuous
        return (
            self.n_train if self.n_train is not None else n * 1000,
            self.n_cal if self.n_cal is not None else n * 500,
            self.n_test if self.n_test is not None else n * 100,
        )

    def train_config(self) -> TrainConfig:
        return TrainConfig(
            learning_rate=self.learning_rate,
            epochs=self.epochs,
            batch_size=self.batch_size,
            dropout_rate=self.dropout_rate,
            seed=self.seed,
        )


def parse_config_text(text: str) -> ExperimentConfig:
    known = {f.name for f in fields(ExperimentConfig)}
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key = value, got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in known:
            raise ValueError(f"config line {lineno}: unknown key {key!r}")
        values[key] = value
    kwargs = {}
    for key, value in values.items():
        if key in ("model", "property", "property2", "compose_op", "params_path"):
            kwargs[key] = value
        elif key in ("alpha", "learning_rate", "dropout_rate"):
            kwargs[key] = float(value)
        else:
            kwargs[key] = int(value)
    return ExperimentConfig(**kwargs)


def load_config(path) -> ExperimentConfig:
    with open(path) as f:
        return parse_config_text(f.read())
