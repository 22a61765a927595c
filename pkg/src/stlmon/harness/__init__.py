"""Experiment orchestration: config files, pipeline stages, CLI, figures."""

from .config import ExperimentConfig, load_config, parse_config_text
from .pipeline import Paths, StageError, run_experiment, run_sequential

__all__ = [
    "ExperimentConfig",
    "Paths",
    "StageError",
    "load_config",
    "parse_config_text",
    "run_experiment",
    "run_sequential",
]
