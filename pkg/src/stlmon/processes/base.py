"""Stochastic process abstraction and seeded simulation.

A model owns a hybrid state space (discrete modes x continuous values), an
initial-state sampler and a Markovian one-step transition.  Trajectories
expose the flattened state: continuous dimensions first, then the modes
real-coded as trailing dimensions, so STL atoms can reference modes too.

Each trajectory consumes its own Philox stream derived from
(seed, trajectory index); serial and fanned-out simulation therefore agree
bit-exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List

import numpy as np

from ..rng import STREAM_STATE_SAMPLING, stream, trajectory_stream
from ..stl import Trajectory


@dataclass(frozen=True)
class HybridState:
    modes: tuple
    continuous: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "modes", tuple(int(m) for m in self.modes))
        cont = np.asarray(self.continuous, dtype=float)
        cont.setflags(write=False)
        object.__setattr__(self, "continuous", cont)


@dataclass(frozen=True)
class SimConfig:
    seed: int
    horizon: int
    count: int

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if self.count < 1:
            raise ValueError("count must be >= 1")


class ProcessModel:
    """Base class for the benchmark systems."""

    name: str = "?"
    n_continuous: int = 0
    n_discrete: int = 0
    dt: float = 1.0
    horizon_default: int = 1

    @property
    def n_flat(self) -> int:
        return self.n_continuous + self.n_discrete

    @property
    def var_names(self) -> List[str]:
        """Names of the flattened state dimensions, continuous then modes."""
        raise NotImplementedError

    def sample_initial_state(self, rng) -> HybridState:
        raise NotImplementedError

    def step(self, state: HybridState, rng) -> HybridState:
        raise NotImplementedError

    def default_property(self) -> str:
        """STL property text monitored for this model by default."""
        raise NotImplementedError

    # --- plumbing ---

    def validate_state(self, state: HybridState):
        if len(state.modes) != self.n_discrete:
            raise ValueError(
                f"{self.name}: expected {self.n_discrete} modes, got {len(state.modes)}"
            )
        if state.continuous.shape != (self.n_continuous,):
            raise ValueError(
                f"{self.name}: expected {self.n_continuous} continuous dims, "
                f"got shape {state.continuous.shape}"
            )

    def flatten(self, state: HybridState) -> np.ndarray:
        return np.concatenate([state.continuous, np.asarray(state.modes, dtype=float)])

    def unflatten(self, vec) -> HybridState:
        vec = np.asarray(vec, dtype=float)
        return HybridState(
            modes=tuple(int(round(m)) for m in vec[self.n_continuous :]),
            continuous=vec[: self.n_continuous],
        )

    def simulate_one(self, s0: HybridState, rng, horizon: int) -> np.ndarray:
        """One trajectory of horizon+1 flattened states, first one equal to s0."""
        states = np.empty((horizon + 1, self.n_flat))
        states[0] = self.flatten(s0)
        s = s0
        for k in range(horizon):
            s = self.step(s, rng)
            states[k + 1] = self.flatten(s)
        return states


def simulate(model: ProcessModel, s0: HybridState, cfg: SimConfig) -> List[Trajectory]:
    """cfg.count seeded trajectories from s0, each horizon+1 states long."""
    model.validate_state(s0)
    out = []
    for j in range(cfg.count):
        rng = trajectory_stream(cfg.seed, j)
        out.append(Trajectory(model.simulate_one(s0, rng, cfg.horizon), dt=model.dt))
    return out


def sample_states(model: ProcessModel, count: int, seed: int) -> List[HybridState]:
    """count draws from the model's initial-state distribution."""
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = stream(seed, STREAM_STATE_SAMPLING)
    return [model.sample_initial_state(rng) for _ in range(count)]
