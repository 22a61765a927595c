"""Gene regulatory network: h genes repressing each other in a cycle.

Protein counts change deterministically (production minus degradation, with
different rates for active and repressed genes) while gene activation
switches stochastically: protein i-1 binds to gene i at a rate proportional
to its count, unbinding happens at a constant rate.  Exponentially
distributed firing times are sampled per Euler substep; counts are floored
at zero.
"""

from __future__ import annotations

import math

import numpy as np

from .base import HybridState, ProcessModel
from .params import load_params

GENE_OFF, GENE_ON = 0, 1


class GeneRegulatoryNetwork(ProcessModel):
    name = "grn"

    def __init__(self, h: int, params=None):
        if h < 2:
            raise ValueError("grn needs at least two genes")
        p = dict(params) if params is not None else load_params("grn")
        self.h = h
        self.name = f"grn{h}"
        self.n_continuous = h
        self.n_discrete = h
        self.a = float(p["a"])   # production rate, gene repressed
        self.b = float(p["b"])   # degradation rate, gene repressed
        self.c = float(p["c"])   # production rate, gene active
        self.d = float(p["d"])   # degradation rate, gene active
        self.k_b = float(p["k_b"])
        self.k_u = float(p["k_u"])
        self.v_ub = float(p["v_ub"])
        self.init_lo = float(p["init_lo"])
        self.init_hi = float(p["init_hi"])
        self.dt = float(p["dt"])
        self.substeps = int(p["substeps"])
        self.horizon_default = int(p["horizon"])

    @property
    def var_names(self):
        return [f"p{i+1}" for i in range(self.h)] + [f"g{i+1}" for i in range(self.h)]

    def sample_initial_state(self, rng) -> HybridState:
        counts = rng.uniform(self.init_lo, self.init_hi, size=self.h)
        modes = tuple(int(m) for m in rng.integers(0, 2, size=self.h))
        return HybridState(modes=modes, continuous=counts)

    def step(self, state: HybridState, rng) -> HybridState:
        v = np.array(state.continuous)
        modes = list(state.modes)
        h_sub = self.dt / self.substeps
        for _ in range(self.substeps):
            # mode switches: gene i is repressed when protein i-1 binds
            for i in range(self.h):
                repressor = v[(i - 1) % self.h]
                if modes[i] == GENE_ON:
                    rate = self.k_b * repressor
                else:
                    rate = self.k_u
                if rate > 0 and rng.random() < 1.0 - math.exp(-rate * h_sub):
                    modes[i] = GENE_OFF if modes[i] == GENE_ON else GENE_ON
            on = np.asarray(modes, dtype=float)
            dv = on * (self.c - self.d * v) + (1.0 - on) * (self.a - self.b * v)
            v = np.maximum(0.0, v + h_sub * dv)
        return HybridState(modes=tuple(modes), continuous=v)

    def gene_property(self, gene: int) -> str:
        if not (1 <= gene <= self.h):
            raise ValueError(f"gene index out of range: {gene}")
        h = self.horizon_default
        return f"G[{h // 2},{h}](p{gene} <= {self.v_ub})"

    def default_property(self) -> str:
        return self.gene_property(1)
