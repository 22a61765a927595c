"""Deterministic minibatch training of the quantile regression MLP."""

from __future__ import annotations

import logging
from dataclasses import dataclass
import numpy as np

from ..rng import STREAM_TRAINING, stream
from .losses import joint_loss
from .network import QRModel, crossing_rate, forward, gradient, init_model

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 5e-4
    epochs: int = 500
    batch_size: int = 512
    dropout_rate: float = 0.1
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0 or self.batch_size < 1 or self.epsilon <= 0:
            raise ValueError("learning rate, batch size and epsilon must be positive")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if not (0.0 <= self.dropout_rate < 1.0):
            raise ValueError("dropout rate must lie in [0, 1)")
        if not (0.0 <= self.beta1 < 1.0 and 0.0 <= self.beta2 < 1.0):
            raise ValueError("Adam moment decays must lie in [0, 1)")


def dataset_loss(model: QRModel, X, y) -> float:
    out, _ = forward(model, X)
    return float(joint_loss(model.alpha, y, out).mean())


def train_arrays(
    X,
    y,
    alpha: float,
    cfg: TrainConfig = TrainConfig(),
    scaling_hash: str = "",
) -> QRModel:
    """Fit the MLP on (state, robustness sample) pairs already in scaled space.

    Fully deterministic given cfg.seed: initialization, shuffles and
    dropout masks all come from one counter-based stream.  Raises on a
    non-finite epoch loss.  The per-epoch loss history is returned on the
    model as model.history.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).reshape(-1)
    if X.shape[0] != y.shape[0] or X.shape[0] == 0:
        raise ValueError("X and y must be nonempty with matching lengths")

    rng = stream(cfg.seed, STREAM_TRAINING)
    model = init_model(X.shape[1], alpha, rng, seed=cfg.seed, scaling_hash=scaling_hash)
    model.initial_loss = dataset_loss(model, X, y)
    model.history = []

    m_w = [np.zeros_like(w) for w in model.weights]
    v_w = [np.zeros_like(w) for w in model.weights]
    m_b = [np.zeros_like(b) for b in model.biases]
    v_b = [np.zeros_like(b) for b in model.biases]
    t = 0
    n = X.shape[0]
    n_hidden = len(model.weights) - 1
    keep = 1.0 - cfg.dropout_rate

    for epoch in range(cfg.epochs):
        order = rng.permutation(n)
        epoch_loss = 0.0
        for start in range(0, n, cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            xb, yb = X[idx], y[idx]
            masks = None
            if cfg.dropout_rate > 0:
                masks = [
                    (rng.random((len(idx), model.weights[i].shape[1])) >= cfg.dropout_rate)
                    / keep
                    for i in range(n_hidden)
                ]
            out, _ = forward(model, xb, masks)
            epoch_loss += float(joint_loss(alpha, yb, out).sum())
            w_grads, b_grads = gradient(model, xb, yb, masks)
            t += 1
            bc1 = 1.0 - cfg.beta1**t
            bc2 = 1.0 - cfg.beta2**t
            for i in range(len(model.weights)):
                m_w[i] = cfg.beta1 * m_w[i] + (1 - cfg.beta1) * w_grads[i]
                v_w[i] = cfg.beta2 * v_w[i] + (1 - cfg.beta2) * w_grads[i] ** 2
                model.weights[i] -= cfg.learning_rate * (m_w[i] / bc1) / (
                    np.sqrt(v_w[i] / bc2) + cfg.epsilon
                )
                m_b[i] = cfg.beta1 * m_b[i] + (1 - cfg.beta1) * b_grads[i]
                v_b[i] = cfg.beta2 * v_b[i] + (1 - cfg.beta2) * b_grads[i] ** 2
                model.biases[i] -= cfg.learning_rate * (m_b[i] / bc1) / (
                    np.sqrt(v_b[i] / bc2) + cfg.epsilon
                )
        epoch_loss /= n
        if not np.isfinite(epoch_loss):
            raise RuntimeError(
                f"training diverged: non-finite loss {epoch_loss} at epoch {epoch}"
            )
        model.history.append(epoch_loss)

    rate = crossing_rate(model, X)
    logger.info("trained %d epochs, final loss %.6f, head crossing rate %.4f",
                cfg.epochs, model.history[-1], rate)
    return model


def train(train_set, cfg: TrainConfig = TrainConfig(), scaler=None) -> QRModel:
    """Train from a labeled dataset; each record expands to M pairs.

    If a scaler is given, states and targets are mapped to [-1, 1] first
    and its train-content hash is stamped on the model so downstream
    stages can detect mismatched artifacts.
    """
    if len(train_set) == 0:
        raise ValueError("training set is empty")
    X, y = train_set.training_pairs()
    scaling_hash = ""
    if scaler is not None:
        X = scaler.transform_states(X)
        y = scaler.transform_targets(y)
        scaling_hash = scaler.train_hash
    return train_arrays(X, y, train_set.alpha, cfg, scaling_hash=scaling_hash)
