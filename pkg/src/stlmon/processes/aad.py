"""Automated anaesthesia delivery: 3-dimensional linear stochastic system.

Drug concentrations v evolve as v' = A v + b q + w with Gaussian
disturbance w and a threshold controller on the infusion rate q.  The A and
b defaults are committed repo constants (patient-specific in general) and
can be overridden via the parameter file.
"""

from __future__ import annotations

import numpy as np

from .base import HybridState, ProcessModel
from .params import load_params


class AnaesthesiaDelivery(ProcessModel):
    name = "aad"
    n_continuous = 3
    n_discrete = 0

    def __init__(self, params=None):
        p = dict(params) if params is not None else load_params("aad")
        self.A = np.asarray(p["A"], dtype=float)
        self.b = np.asarray(p["b"], dtype=float)
        if self.A.shape != (3, 3) or self.b.shape != (3,):
            raise ValueError("aad: A must be 3x3 and b length 3")
        self.noise_std = float(p["noise_var"]) ** 0.5
        self.q_threshold = float(p["q_threshold"])
        self.q_low_rate = float(p["q_low_rate"])    # infusion while v1 below threshold
        self.q_high_rate = float(p["q_high_rate"])  # infusion once v1 at/above threshold
        self.init_lo = np.asarray(p["init_lo"], dtype=float)
        self.init_hi = np.asarray(p["init_hi"], dtype=float)
        self.safe_lo = np.asarray(p["safe_lo"], dtype=float)
        self.safe_hi = np.asarray(p["safe_hi"], dtype=float)
        self.dt = float(p["dt"])
        self.horizon_default = int(p["horizon"])

    @property
    def var_names(self):
        return ["v1", "v2", "v3"]

    def controller(self, v1: float) -> float:
        return self.q_low_rate if v1 < self.q_threshold else self.q_high_rate

    def sample_initial_state(self, rng) -> HybridState:
        v = rng.uniform(self.init_lo, self.init_hi)
        return HybridState(modes=(), continuous=v)

    def step(self, state: HybridState, rng) -> HybridState:
        v = state.continuous
        q = self.controller(v[0])
        w = rng.normal(0.0, self.noise_std, size=3)
        return HybridState(modes=(), continuous=self.A @ v + self.b * q + w)

    def simulate_one(self, s0, rng, horizon):
        # same draw order as step(): one normal triple per step
        w = rng.normal(0.0, self.noise_std, size=(horizon, 3))
        states = np.empty((horizon + 1, 3))
        states[0] = s0.continuous
        v = s0.continuous
        for k in range(horizon):
            q = self.controller(v[0])
            v = self.A @ v + self.b * q + w[k]
            states[k + 1] = v
        return states

    def default_property(self) -> str:
        h = self.horizon_default
        box = " and ".join(
            f"(v{i+1} >= {self.safe_lo[i]}) and (v{i+1} <= {self.safe_hi[i]})"
            for i in range(3)
        )
        return f"G[0,{h}]({box})"

    def eventually_property(self) -> str:
        return f"F[0,{self.horizon_default}](v1 - v2 < 0)"
