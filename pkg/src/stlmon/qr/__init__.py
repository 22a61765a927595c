"""Quantile regression of STL robustness distributions."""

from .checkpoint import load_model, save_model
from .losses import joint_loss, pinball_loss, quantile_levels
from .network import (
    QRModel,
    crossing_rate,
    forward,
    get_flat_params,
    gradient,
    init_model,
    predict_batch,
    predict_quantiles,
    predict_raw,
    set_flat_params,
)
from .training import TrainConfig, dataset_loss, train, train_arrays

__all__ = [
    "QRModel",
    "TrainConfig",
    "crossing_rate",
    "dataset_loss",
    "forward",
    "get_flat_params",
    "gradient",
    "init_model",
    "joint_loss",
    "load_model",
    "pinball_loss",
    "predict_batch",
    "predict_quantiles",
    "predict_raw",
    "quantile_levels",
    "save_model",
    "set_flat_params",
    "train",
    "train_arrays",
]
