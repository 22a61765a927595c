"""Benchmark stochastic processes and seeded simulation."""

from __future__ import annotations

import re

from .aad import AnaesthesiaDelivery
from .base import HybridState, ProcessModel, SimConfig, sample_states, simulate
from .grn import GeneRegulatoryNetwork
from .ht import HeatedTank
from .mrh import MultiRoomHeating
from .params import load_params, parse_params_text

_MODULAR_RE = re.compile(r"^(mrh|grn)(\d+)$")


def get_model(name: str, params_path=None) -> ProcessModel:
    """Build a model from its CLI name: aad, ht, mrh<h> or grn<h>."""
    if name == "aad":
        return AnaesthesiaDelivery(load_params("aad", params_path))
    if name == "ht":
        return HeatedTank(load_params("ht", params_path))
    m = _MODULAR_RE.match(name)
    if m:
        kind, h = m.group(1), int(m.group(2))
        params = load_params(kind, params_path)
        if kind == "mrh":
            return MultiRoomHeating(h, params)
        return GeneRegulatoryNetwork(h, params)
    raise ValueError(f"unknown model {name!r}; expected aad, ht, mrh<h> or grn<h>")


__all__ = [
    "AnaesthesiaDelivery",
    "GeneRegulatoryNetwork",
    "HeatedTank",
    "HybridState",
    "MultiRoomHeating",
    "ProcessModel",
    "SimConfig",
    "get_model",
    "load_params",
    "parse_params_text",
    "sample_states",
    "simulate",
]
