"""Three-output quantile regression MLP with manual backpropagation.

Architecture: input -> 20 -> 20 -> 20 -> 3 fully connected layers with
LeakyReLU (slope 0.01) on the hidden layers.  The three heads estimate the
conditional robustness quantiles at levels alpha/2, 0.5 and 1 - alpha/2;
they are sorted ascending at inference so intervals are always well formed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .losses import pinball_grad, quantile_levels

LEAKY_SLOPE = 0.01
HIDDEN_SIZES = (20, 20, 20)
N_HEADS = 3


@dataclass
class QRModel:
    weights: List[np.ndarray]   # weights[i] has shape (fan_in, fan_out)
    biases: List[np.ndarray]
    alpha: float
    seed: int = 0
    scaling_hash: str = ""
    initial_loss: float = float("nan")
    history: List[float] = field(default_factory=list)

    @property
    def layer_sizes(self) -> Tuple[int, ...]:
        return tuple(w.shape[0] for w in self.weights) + (self.weights[-1].shape[1],)

    @property
    def input_dim(self) -> int:
        return self.weights[0].shape[0]

    @property
    def levels(self):
        return quantile_levels(self.alpha)


def init_model(input_dim: int, alpha: float, rng, seed: int = 0,
               scaling_hash: str = "") -> QRModel:
    """Glorot-uniform weights, zero biases, drawn from the given stream."""
    sizes = (input_dim,) + HIDDEN_SIZES + (N_HEADS,)
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return QRModel(weights, biases, alpha, seed=seed, scaling_hash=scaling_hash)


def _leaky(z):
    return np.where(z > 0, z, LEAKY_SLOPE * z)


def _leaky_grad(z):
    return np.where(z > 0, 1.0, LEAKY_SLOPE)


def forward(model: QRModel, X, masks: Optional[List[np.ndarray]] = None):
    """Raw head outputs (n, 3) plus the caches backward() needs.

    masks, if given, are inverted-dropout multipliers for the hidden
    activations (already scaled by 1/(1-rate)); omitted at inference.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    pre, post = [], [X]
    a = X
    n_hidden = len(model.weights) - 1
    for i in range(n_hidden):
        z = a @ model.weights[i] + model.biases[i]
        a = _leaky(z)
        if masks is not None:
            a = a * masks[i]
        pre.append(z)
        post.append(a)
    out = a @ model.weights[-1] + model.biases[-1]
    return out, (pre, post)


def predict_raw(model: QRModel, X) -> np.ndarray:
    out, _ = forward(model, X)
    return out


def predict_batch(model: QRModel, X) -> np.ndarray:
    """Sorted (q_lo, q_med, q_hi) rows; dropout disabled."""
    return np.sort(predict_raw(model, X), axis=1)


def predict_quantiles(model: QRModel, state) -> Tuple[float, float, float]:
    q = predict_batch(model, np.atleast_2d(state))[0]
    return float(q[0]), float(q[1]), float(q[2])


def crossing_rate(model: QRModel, X) -> float:
    """Fraction of states whose raw heads are out of ascending order."""
    raw = predict_raw(model, X)
    crossed = (raw[:, 0] > raw[:, 1]) | (raw[:, 1] > raw[:, 2])
    return float(crossed.mean())


def gradient(model: QRModel, X, y, masks: Optional[List[np.ndarray]] = None):
    """Gradient of the mean joint pinball loss over the batch.

    Returns (weight_grads, bias_grads) lists matching the model layout.
    Exposed so the finite-difference check can exercise the exact
    backpropagation path used in training.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float)
    if X.shape[0] == 0:
        raise ValueError("gradient needs a nonempty batch")
    out, (pre, post) = forward(model, X, masks)
    n = X.shape[0]
    levels = model.levels
    # d(mean joint loss)/d(raw heads): pinball subgradients averaged over
    # the three levels and the batch
    delta = np.stack(
        [pinball_grad(a, y, out[:, k]) for k, a in enumerate(levels)], axis=1
    ) / (3.0 * n)

    w_grads = [None] * len(model.weights)
    b_grads = [None] * len(model.biases)
    for i in reversed(range(len(model.weights))):
        a_in = post[i]
        w_grads[i] = a_in.T @ delta
        b_grads[i] = delta.sum(axis=0)
        if i > 0:
            delta = delta @ model.weights[i].T
            if masks is not None:
                delta = delta * masks[i - 1]
            delta = delta * _leaky_grad(pre[i - 1])
    return w_grads, b_grads


def get_flat_params(model: QRModel) -> np.ndarray:
    parts = []
    for w, b in zip(model.weights, model.biases):
        parts.append(w.reshape(-1))
        parts.append(b)
    return np.concatenate(parts)


def set_flat_params(model: QRModel, theta: np.ndarray):
    pos = 0
    for i, (w, b) in enumerate(zip(model.weights, model.biases)):
        model.weights[i] = theta[pos : pos + w.size].reshape(w.shape)
        pos += w.size
        model.biases[i] = theta[pos : pos + b.size].copy()
        pos += b.size
    if pos != theta.size:
        raise ValueError("parameter vector length does not match the model")
