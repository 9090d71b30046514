"""Fixed-step deterministic simulation kernel.

One shared rate for physics and control. The per-tick order
(sensors -> channels -> controllers -> plants -> telemetry) is part of the
public contract because delay semantics depend on it; `run_session` owns
that loop and the wiring object implements the stages.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

VALID_DOF = (1, 2, 3)


class ConfigError(ValueError):
    """A configuration value or wiring violates an invariant.

    The message names the offending path or port.
    """


class SimulationFault(RuntimeError):
    """A non-finite value appeared; names the producing module and tick."""

    def __init__(self, module: str, tick: int, detail: str = ""):
        self.module = module
        self.tick = tick
        msg = f"non-finite value produced by {module!r} at tick {tick}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


@dataclass(frozen=True)
class SimConfig:
    dt: float = 0.001
    duration: float = 10.0
    seed: int = 0
    dof: int = 1

    def __post_init__(self):
        if not self.dt > 0:
            raise ConfigError(f"sim.dt must be > 0, got {self.dt}")
        if self.duration < 0:
            raise ConfigError(f"sim.duration must be >= 0, got {self.duration}")
        if self.dof not in VALID_DOF:
            raise ConfigError(f"sim.dof must be one of {VALID_DOF}, got {self.dof}")
        if not (0 <= int(self.seed) < 2**64):
            raise ConfigError(f"sim.seed must be a 64-bit unsigned integer, got {self.seed}")

    @property
    def n_ticks(self) -> int:
        return int(np.floor(self.duration / self.dt))


@dataclass(frozen=True)
class Tick:
    index: int
    dt: float

    @property
    def time(self) -> float:
        # derived by multiplication, never by summation: no drift
        return self.index * self.dt


@dataclass
class AxisState:
    """Position/velocity of one end-effector or device, length-dof vectors."""

    x: np.ndarray
    v: np.ndarray

    @classmethod
    def zeros(cls, dof: int) -> "AxisState":
        return cls(np.zeros(dof), np.zeros(dof))

    @classmethod
    def of(cls, x, v) -> "AxisState":
        return cls(np.atleast_1d(np.asarray(x, dtype=float)),
                   np.atleast_1d(np.asarray(v, dtype=float)))

    def copy(self) -> "AxisState":
        return AxisState(self.x.copy(), self.v.copy())

    @property
    def dof(self) -> int:
        return len(self.x)


def require_finite(value, module: str, tick: int = -1):
    """Fail loudly instead of letting NaN/inf propagate silently."""
    arr = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise SimulationFault(module, tick)
    return arr


def integrate_step(state: AxisState, accel, dt: float, *, module: str = "integrator",
                   tick: int = -1) -> AxisState:
    """Semi-implicit Euler: v' = v + a*dt, x' = x + v'*dt.

    Symplectic, so undamped oscillators stay energy-bounded; bit-stable for
    identical inputs.
    """
    if not dt > 0:
        raise ConfigError(f"integrate_step dt must be > 0, got {dt}")
    a = require_finite(accel, module, tick)
    require_finite(state.x, module, tick)
    require_finite(state.v, module, tick)
    v_next = state.v + a * dt
    x_next = state.x + v_next * dt
    return AxisState(x_next, v_next)


def run_session(config: SimConfig, wiring, series=None):
    """Execute floor(duration/dt) ticks in the fixed stage order.

    `wiring` must provide validate() and step(tick) -> record dict; a
    SimulationFault aborts the loop and is attached to the returned series
    as a diagnostic (no clamping, no silent NaN propagation).
    """
    from .telemetry import TelemetrySeries, record_append

    if series is None:
        series = TelemetrySeries(header=getattr(wiring, "header", lambda: {})())
    wiring.validate()
    for k in range(config.n_ticks):
        tick = Tick(k, config.dt)
        try:
            record = wiring.step(tick)
        except SimulationFault as fault:
            series.fault = {"module": fault.module, "tick": fault.tick, "message": str(fault)}
            break
        record_append(series, record)
    return series
