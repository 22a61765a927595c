"""Heated tank: piecewise-deterministic liquid level and temperature.

Two inflow pumps and an outflow valve move the liquid level; a hysteresis
controller keeps the level between its low and high thresholds unless units
are stuck.  Each unit can fail (On -> StuckOn, Off -> StuckOff) with an
exponentially distributed firing time; failures are sampled per Euler
substep.  Continuous dynamics are integrated with forward Euler using a
fixed number of substeps per time step.
"""

from __future__ import annotations

import math

import numpy as np

from .base import HybridState, ProcessModel
from .params import load_params

# unit modes
OFF, ON, STUCK_ON, STUCK_OFF = 0, 1, 2, 3
# controller modes
NORMAL, INCREASE, DECREASE = 0, 1, 2

_FLOWING = {ON: 1.0, STUCK_ON: 1.0, OFF: 0.0, STUCK_OFF: 0.0}


class HeatedTank(ProcessModel):
    name = "ht"
    n_continuous = 2   # liquid height, liquid temperature
    n_discrete = 4     # pump1, pump2, valve, controller

    def __init__(self, params=None):
        p = dict(params) if params is not None else load_params("ht")
        self.g = float(p["g"])
        self.rates = (float(p["lambda_p1"]), float(p["lambda_p2"]), float(p["lambda_w"]))
        self.t_in = float(p["t_in"])
        self.e_in = float(p["e_in"])
        self.h_low = float(p["h_low"])
        self.h_high = float(p["h_high"])
        self.h_dryout = float(p["h_dryout"])
        self.h_overflow = float(p["h_overflow"])
        self.t_overheat = float(p["t_overheat"])
        self.init_height = (float(p["init_height_lo"]), float(p["init_height_hi"]))
        self.init_temp = (float(p["init_temp_lo"]), float(p["init_temp_hi"]))
        self.dt = float(p["dt"])
        self.substeps = int(p["substeps"])
        self.horizon_default = int(p["horizon"])
        # per-substep failure probabilities, sampled by inversion
        h_sub = self.dt / self.substeps
        self._fail_prob = tuple(1.0 - math.exp(-lam * h_sub) for lam in self.rates)

    @property
    def var_names(self):
        return ["height", "temp", "m_p1", "m_p2", "m_w", "m_ctrl"]

    def sample_initial_state(self, rng) -> HybridState:
        height = rng.uniform(*self.init_height)
        temp = rng.uniform(*self.init_temp)
        units = tuple(int(m) for m in rng.integers(0, 2, size=3))  # On/Off only
        return HybridState(modes=units + (NORMAL,), continuous=np.array([height, temp]))

    def _control(self, height, units, ctrl):
        if height <= self.h_low and ctrl != INCREASE:
            ctrl = INCREASE
        elif height >= self.h_high and ctrl != DECREASE:
            ctrl = DECREASE
        else:
            return units, ctrl
        # commands are ignored by stuck units
        p1, p2, w = units
        if ctrl == INCREASE:
            targets = (ON, ON, OFF)
        else:
            targets = (OFF, OFF, ON)
        new = tuple(
            u if u in (STUCK_ON, STUCK_OFF) else t for u, t in zip((p1, p2, w), targets)
        )
        return new, ctrl

    def _fail(self, units, rng):
        new = []
        for i, u in enumerate(units):
            if u == ON and rng.random() < self._fail_prob[i]:
                u = STUCK_ON
            elif u == OFF and rng.random() < self._fail_prob[i]:
                u = STUCK_OFF
            new.append(u)
        return tuple(new)

    def step(self, state: HybridState, rng) -> HybridState:
        height, temp = state.continuous
        p1, p2, w = state.modes[:3]
        ctrl = state.modes[3]
        h_sub = self.dt / self.substeps
        for _ in range(self.substeps):
            (p1, p2, w), ctrl = self._control(height, (p1, p2, w), ctrl)
            p1, p2, w = self._fail((p1, p2, w), rng)
            chi1, chi2, chi_w = _FLOWING[p1], _FLOWING[p2], _FLOWING[w]
            dh = (chi1 + chi2 - chi_w) * self.g
            dtemp = ((chi1 + chi2) * (self.t_in - temp) * self.g + self.e_in) / max(
                height, 1e-6
            )
            height = max(0.0, height + h_sub * dh)
            temp = temp + h_sub * dtemp
        return HybridState(
            modes=(p1, p2, w, ctrl), continuous=np.array([height, temp])
        )

    def default_property(self) -> str:
        return (
            f"G[0,{self.horizon_default}]((height >= {self.h_dryout}) and "
            f"(height <= {self.h_overflow}) and (temp <= {self.t_overheat}))"
        )
