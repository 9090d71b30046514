"""Bilateral layer between the local-device and remote controllers.

Two architectures are implemented and switchable at any tick:

* position-force: master->slave motion (C1) and slave->master force
  reflection (C2) only; light free-motion feel.
* 4-channel: adds operator-force feedforward to the slave (C3) and
  slave->master motion coordination (C4); stiffer coupling, better
  contact stability.

Also here: the energy-budgeted friction-compensation feedforward and the
passivity observer used for contact-stability claims.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .core import AxisState, ConfigError
from .plants import V_EPS


class BilateralMode(enum.Enum):
    POSITION_FORCE = "position_force"
    FOUR_CHANNEL = "four_channel"


@dataclass(frozen=True)
class BilateralGains:
    c1_kp: float = 400.0        # slave-side tracking of transmitted master motion
    c1_kd: float = 40.0
    c2_scale: float = 1.0       # force reflection slave->master
    c3_scale: float = 1.0       # operator-force feedforward master->slave (4ch only)
    c4_kp: float = 200.0        # master-side coordination from transmitted slave motion
    c4_kd: float = 20.0
    local_damping_m: float = 5.0
    local_damping_s: float = 5.0

    def __post_init__(self):
        for name in ("c1_kp", "c1_kd", "c2_scale", "c3_scale", "c4_kp", "c4_kd",
                     "local_damping_m", "local_damping_s"):
            if getattr(self, name) < 0:
                raise ConfigError(f"bilateral.{name} must be >= 0")


def check_mode_gains(gains: BilateralGains, mode: BilateralMode):
    """Position-force mode uses C1/C2 only; explicitly wiring C3/C4 into it
    is a configuration error rather than a silent ignore."""
    if mode is BilateralMode.POSITION_FORCE:
        if gains.c3_scale != 0.0:
            raise ConfigError("position-force mode requires c3_scale = 0")
        if gains.c4_kp != 0.0 or gains.c4_kd != 0.0:
            raise ConfigError("position-force mode requires c4 gains = 0")


def effective_gains(gains: BilateralGains, mode: BilateralMode) -> BilateralGains:
    """Mode-resolved view: C3/C4 are absent (zero) in position-force mode."""
    if mode is BilateralMode.POSITION_FORCE:
        return BilateralGains(gains.c1_kp, gains.c1_kd, gains.c2_scale, 0.0, 0.0, 0.0,
                              gains.local_damping_m, gains.local_damping_s)
    return gains


def slave_command(gains: BilateralGains, mode: BilateralMode, master_motion_rx: AxisState,
                  f_h_rx, slave_state: AxisState) -> np.ndarray:
    """Total controller force into the slave's virtual admittance.

    C1: PD tracking of the transmitted master motion (the position term is
    the admittance K about x_ref = received master position, the velocity
    feedforward cancels the admittance damping at matched speed).
    4-channel adds C3: scaled received operator force.
    """
    if mode is BilateralMode.POSITION_FORCE and gains.c3_scale != 0.0:
        raise ConfigError("nonzero c3_scale in position-force mode")
    f = (gains.c1_kp * (master_motion_rx.x - slave_state.x)
         + gains.c1_kd * (master_motion_rx.v - slave_state.v))
    if mode is BilateralMode.FOUR_CHANNEL:
        f = f + gains.c3_scale * np.asarray(f_h_rx, dtype=float)
    return f


def master_command(gains: BilateralGains, mode: BilateralMode, slave_motion_rx: AxisState,
                   f_e_rx, master_state: AxisState, c4_ref_x=None, c4_ref_v=None) -> np.ndarray:
    """Force applied to the master device.

    position-force: f_m = -c2*f_e_rx - local_damping_m*v_m (nothing else).
    4-channel adds -c4_kp*(dx - ref_x) - c4_kd*(dv - ref_v) where
    dx = x_m - x_s_rx; the refs are the re-zeroed offsets captured at the
    last switch into 4-channel (zero for a session that starts there).
    """
    f_e = np.asarray(f_e_rx, dtype=float)
    f = -gains.c2_scale * f_e - gains.local_damping_m * master_state.v
    if mode is BilateralMode.FOUR_CHANNEL:
        dx = master_state.x - slave_motion_rx.x
        dv = master_state.v - slave_motion_rx.v
        if c4_ref_x is not None:
            dx = dx - c4_ref_x
        if c4_ref_v is not None:
            dv = dv - c4_ref_v
        f = f - gains.c4_kp * dx - gains.c4_kd * dv
    return f


@dataclass
class EnergyBudget:
    """Ledger limiting friction compensation to energy the operator put in."""

    accumulated_interaction_energy: float = 0.0
    spent_compensation_energy: float = 0.0

    def accumulate(self, f_h, v_m, dt: float):
        inflow = float(np.dot(np.asarray(f_h, dtype=float), np.asarray(v_m, dtype=float)))
        self.accumulated_interaction_energy += max(0.0, inflow) * dt

    @property
    def available(self) -> float:
        return self.accumulated_interaction_energy - self.spent_compensation_energy


def friction_feedforward(viscous: float, coulomb: float, master_state: AxisState,
                         budget: EnergyBudget, dt: float) -> np.ndarray:
    """Feedforward canceling the master's friction model, scaled down so the
    cumulative emitted energy never exceeds the accumulated interaction
    energy (the compensator cannot be a net source larger than the operator
    supplied)."""
    v = master_state.v
    candidate = viscous * v + coulomb * np.tanh(v / V_EPS)
    cost = float(np.dot(candidate, v)) * dt  # >= 0: candidate is along v
    if cost <= 0.0:
        return np.zeros_like(v)
    scale = min(1.0, max(0.0, budget.available) / cost)
    budget.spent_compensation_energy += scale * cost
    return scale * candidate


# --- mode switching with bumpless transfer ---------------------------------

REF_DECAY_TAU = 0.5   # s; C4 re-zeroed offsets decay back to full coordination
FADE_TAU = 0.1        # s; switch residual keeping the command continuous


@dataclass
class BilateralControllerState:
    """Per-arm mutable controller state owned by the simulation kernel."""

    gains: BilateralGains
    mode: BilateralMode = BilateralMode.POSITION_FORCE
    dof: int = 1
    c4_ref_x: np.ndarray = None
    c4_ref_v: np.ndarray = None
    switch_residual: np.ndarray = None
    budget: EnergyBudget = field(default_factory=EnergyBudget)

    def __post_init__(self):
        z = np.zeros(self.dof)
        if self.c4_ref_x is None:
            self.c4_ref_x = z.copy()
        if self.c4_ref_v is None:
            self.c4_ref_v = z.copy()
        if self.switch_residual is None:
            self.switch_residual = z.copy()

    def master_force(self, slave_motion_rx: AxisState, f_e_rx,
                     master_state: AxisState) -> np.ndarray:
        f = master_command(self.gains, self.mode, slave_motion_rx, f_e_rx, master_state,
                           self.c4_ref_x, self.c4_ref_v)
        return f + self.switch_residual

    def slave_force(self, master_motion_rx: AxisState, f_h_rx,
                    slave_state: AxisState) -> np.ndarray:
        g = effective_gains(self.gains, self.mode)
        return slave_command(g, self.mode, master_motion_rx, f_h_rx, slave_state)

    def switch_mode(self, new_mode: BilateralMode, master_state: AxisState,
                    slave_motion_rx: AxisState):
        """Bumpless transfer: the switch itself injects no step force.

        Entering 4-channel re-zeroes the C4 references to the instantaneous
        master/slave offset; entering position-force captures the vanishing
        C4 term as a decaying residual so the command is continuous.
        """
        if new_mode is self.mode:
            return
        if new_mode is BilateralMode.FOUR_CHANNEL:
            # re-zeroed references make the incoming C4 term exactly zero,
            # so the carried residual alone keeps the command continuous
            self.c4_ref_x = master_state.x - slave_motion_rx.x
            self.c4_ref_v = master_state.v - slave_motion_rx.v
        else:
            # the vanishing C4 term folds into the residual
            dx = (master_state.x - slave_motion_rx.x) - self.c4_ref_x
            dv = (master_state.v - slave_motion_rx.v) - self.c4_ref_v
            self.switch_residual = -(self.gains.c4_kp * dx + self.gains.c4_kd * dv) \
                + self.switch_residual
        self.mode = new_mode

    def advance(self, dt: float):
        """Per-tick decay of transfer state (after command computation)."""
        self.c4_ref_x = self.c4_ref_x * math.exp(-dt / REF_DECAY_TAU)
        self.c4_ref_v = self.c4_ref_v * math.exp(-dt / REF_DECAY_TAU)
        self.switch_residual = self.switch_residual * math.exp(-dt / FADE_TAU)


# --- passivity observer -----------------------------------------------------

def passivity_energy_trace(f_m, v_m, f_s, v_s, dt: float) -> np.ndarray:
    """Cumulative energy the controller/channel two-port delivers to the
    plants: E(k) = dt * sum_{j<=k} (f_m.v_m + f_s.v_s)."""
    f_m = np.atleast_2d(np.asarray(f_m, dtype=float))
    v_m = np.atleast_2d(np.asarray(v_m, dtype=float))
    f_s = np.atleast_2d(np.asarray(f_s, dtype=float))
    v_s = np.atleast_2d(np.asarray(v_s, dtype=float))
    with np.errstate(over="ignore", invalid="ignore"):
        power = np.sum(f_m * v_m, axis=-1) + np.sum(f_s * v_s, axis=-1)
        return np.cumsum(power) * dt


def passivity_observer(series, arm: int = 0, threshold: float = 0.05,
                       window: int = 200):
    """Energy trace over a recorded series plus the activity flag.

    Flags "active" when E(k) exceeds `threshold` while increasing over the
    trailing `window` ticks. Returns (trace, flag).
    """
    records = series.records if hasattr(series, "records") else series
    if not records:
        return np.zeros(0), False
    try:
        f_m = [r["arms"][arm]["f_m_cmd"] for r in records]
        v_m = [r["arms"][arm]["v_m"] for r in records]
        f_s = [r["arms"][arm]["f_s_cmd"] for r in records]
        v_s = [r["arms"][arm]["v_s"] for r in records]
        header = getattr(series, "header", None) or {}
        dt = header.get("config", {}).get("sim", {}).get("dt")
        if dt is None:
            dt = records[1]["time"] - records[0]["time"] if len(records) > 1 else 1.0
    except (KeyError, IndexError) as exc:
        raise ConfigError(f"series missing passivity-observer field: {exc}") from exc
    trace = passivity_energy_trace(f_m, v_m, f_s, v_s, dt)
    flag = energy_activity_flag(trace, threshold, window)
    return trace, flag


def energy_activity_flag(trace: np.ndarray, threshold: float, window: int) -> bool:
    if len(trace) <= window:
        return bool(len(trace) and np.any(trace > threshold))
    above = trace[window:] > threshold
    rising = trace[window:] > trace[:-window]
    return bool(np.any(above & rising))
