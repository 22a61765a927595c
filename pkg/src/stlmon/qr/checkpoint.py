"""Text checkpoints for trained models.

Self-describing header followed by one flattened array per line, written
with 17 significant digits so a reloaded model reproduces predictions
bit-exactly up to platform rounding.
"""

from __future__ import annotations

import hashlib

import numpy as np

from ..datagen import fmt
from .network import QRModel


def _body_text(model: QRModel) -> str:
    lines = []
    for i, (w, b) in enumerate(zip(model.weights, model.biases)):
        lines.append(f"W{i}: " + " ".join(fmt(v) for v in w.reshape(-1)))
        lines.append(f"b{i}: " + " ".join(fmt(v) for v in b))
    return "\n".join(lines) + "\n"


def save_model(model: QRModel, path):
    body = _body_text(model)
    lo, med, hi = model.levels
    header = [
        f"# layer_sizes: {' '.join(str(s) for s in model.layer_sizes)}",
        f"# alpha: {fmt(model.alpha)}",
        f"# levels: {fmt(lo)} {fmt(med)} {fmt(hi)}",
        f"# seed: {model.seed}",
        f"# scaling_hash: {model.scaling_hash}",
        f"# sha256: {hashlib.sha256(body.encode()).hexdigest()}",
    ]
    with open(path, "w") as f:
        f.write("\n".join(header) + "\n")
        f.write(body)


def load_model(path) -> QRModel:
    meta = {}
    arrays = {}
    with open(path) as f:
        for line in f:
            line = line.rstrip("\n")
            if line.startswith("#"):
                key, _, value = line[1:].partition(":")
                meta[key.strip()] = value.strip()
            elif line:
                name, _, values = line.partition(":")
                arrays[name.strip()] = np.array([float(v) for v in values.split()])
    sizes = [int(s) for s in meta["layer_sizes"].split()]
    weights, biases = [], []
    for i, (fan_in, fan_out) in enumerate(zip(sizes[:-1], sizes[1:])):
        weights.append(arrays[f"W{i}"].reshape(fan_in, fan_out))
        biases.append(arrays[f"b{i}"])
    model = QRModel(
        weights,
        biases,
        alpha=float(meta["alpha"]),
        seed=int(meta["seed"]),
        scaling_hash=meta["scaling_hash"],
    )
    if hashlib.sha256(_body_text(model).encode()).hexdigest() != meta["sha256"]:
        raise ValueError(f"model checkpoint {path} is corrupt: content hash mismatch")
    return model
