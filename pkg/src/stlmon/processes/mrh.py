"""Multi-room heating: thermostat-controlled temperatures in h coupled rooms.

Each step first applies the per-room thermostat (heater on below the lower
switching threshold, off above the upper one), then the stochastic
difference equation with heat exchange toward the ambient temperature and
between adjacent rooms (chain layout).
"""

from __future__ import annotations

import numpy as np

from .base import HybridState, ProcessModel
from .params import load_params


class MultiRoomHeating(ProcessModel):
    name = "mrh"

    def __init__(self, h: int, params=None):
        if h < 1:
            raise ValueError("mrh needs at least one room")
        p = dict(params) if params is not None else load_params("mrh")
        self.h = h
        self.name = f"mrh{h}"
        self.n_continuous = h
        self.n_discrete = h
        self.b = float(p["b"])
        self.c = float(p["c"])
        self.x_a = float(p["x_a"])
        self.noise_std = float(p["noise_std"])
        self.on_threshold = float(p["on_threshold"])
        self.off_threshold = float(p["off_threshold"])
        self.init_lo = float(p["init_lo"])
        self.init_hi = float(p["init_hi"])
        self.v_lb = float(p["v_lb"])
        self.v_ub = float(p["v_ub"])
        self.dt = float(p["dt"])
        self.horizon_default = int(p["horizon"])
        # chain layout: rooms i and i+1 are adjacent
        a = float(p["a"])
        coupling = np.zeros((h, h))
        for i in range(h - 1):
            coupling[i, i + 1] = a
            coupling[i + 1, i] = a
        self.coupling = coupling
        self._row_sum = coupling.sum(axis=1)

    @property
    def var_names(self):
        return [f"t{i+1}" for i in range(self.h)] + [f"heat{i+1}" for i in range(self.h)]

    def sample_initial_state(self, rng) -> HybridState:
        temps = rng.uniform(self.init_lo, self.init_hi, size=self.h)
        modes = tuple(int(m) for m in rng.integers(0, 2, size=self.h))
        return HybridState(modes=modes, continuous=temps)

    def _thermostat(self, temps, modes):
        new = list(modes)
        for i in range(self.h):
            if temps[i] <= self.on_threshold:
                new[i] = 1
            elif temps[i] >= self.off_threshold:
                new[i] = 0
        return tuple(new)

    def step(self, state: HybridState, rng) -> HybridState:
        v = state.continuous
        modes = self._thermostat(v, state.modes)
        w = rng.normal(0.0, self.noise_std, size=self.h)
        v_next = (
            v
            + self.b * (self.x_a - v)
            + self.coupling @ v
            - self._row_sum * v
            + self.c * np.asarray(modes, dtype=float)
            + w
        )
        return HybridState(modes=modes, continuous=v_next)

    def simulate_one(self, s0, rng, horizon):
        w = rng.normal(0.0, self.noise_std, size=(horizon, self.h))
        states = np.empty((horizon + 1, 2 * self.h))
        states[0] = self.flatten(s0)
        v = s0.continuous
        modes = s0.modes
        for k in range(horizon):
            modes = self._thermostat(v, modes)
            v = (
                v
                + self.b * (self.x_a - v)
                + self.coupling @ v
                - self._row_sum * v
                + self.c * np.asarray(modes, dtype=float)
                + w[k]
            )
            states[k + 1, : self.h] = v
            states[k + 1, self.h :] = modes
        return states

    def room_property(self, room: int) -> str:
        if not (1 <= room <= self.h):
            raise ValueError(f"room index out of range: {room}")
        return (
            f"G[0,{self.horizon_default}]"
            f"((t{room} >= {self.v_lb}) and (t{room} <= {self.v_ub}))"
        )

    def default_property(self) -> str:
        return self.room_property(1)
