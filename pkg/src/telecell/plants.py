"""Dynamics of the physical elements.

Point-mass Cartesian end-effector plants (1-3 DOF), a unilateral wall,
a spring-damper object coupling between two bodies, and operator models
(scripted trajectory or impedance) that stand in for the human.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import AxisState, ConfigError

V_EPS = 1e-3  # Coulomb regularization velocity scale (m/s)
DEGENERATE_SEP = 1e-9


@dataclass
class RigidAxisPlant:
    mass: float = 2.0
    viscous_friction: float = 0.0
    coulomb_friction: float = 0.0
    state: AxisState = None

    def __post_init__(self):
        if not self.mass > 0:
            raise ConfigError(f"plant mass must be > 0, got {self.mass}")
        if self.viscous_friction < 0 or self.coulomb_friction < 0:
            raise ConfigError("plant frictions must be >= 0")

    def friction_force(self, v=None) -> np.ndarray:
        """Dissipative force opposing motion; Coulomb term regularized with
        tanh(v/V_EPS) so v=0 is smooth and integration stays deterministic."""
        if v is None:
            v = self.state.v
        return -(self.viscous_friction * v + self.coulomb_friction * np.tanh(v / V_EPS))


@dataclass
class WallContact:
    """One-sided spring-damper wall along a single axis.

    `side=+1` means penetration when x > wall_position (force pushes toward
    -x); `side=-1` is a floor below (penetration when x < wall_position).
    The produced force never pulls.
    """

    wall_position: float = 0.0
    stiffness: float = 0.0
    damping: float = 0.0
    axis: int = 0
    side: int = 1

    def __post_init__(self):
        if self.stiffness < 0 or self.damping < 0:
            raise ConfigError("wall stiffness/damping must be >= 0")
        if self.side not in (1, -1):
            raise ConfigError("wall side must be +1 or -1")


def contact_force(wall: WallContact, state: AxisState) -> np.ndarray:
    """Unilateral contact force: f = -(k*p + b*v) into the free side, clamped
    so the wall never pulls; zero when not penetrating."""
    f = np.zeros_like(state.x)
    p = wall.side * (state.x[wall.axis] - wall.wall_position)
    if p > 0:
        raw = wall.stiffness * p + wall.damping * wall.side * state.v[wall.axis]
        f[wall.axis] = -wall.side * max(0.0, raw)
    return f


@dataclass
class ObjectCoupling:
    """Spring-damper link between two named bodies (the grasped object or the
    bottle squeezed between two arms)."""

    body_a: str
    body_b: str
    rest_length: float = 0.0
    stiffness: float = 0.0
    damping: float = 0.0
    # direction fallback when bodies coincide in 2-3 DOF
    _last_direction: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.stiffness < 0 or self.damping < 0:
            raise ConfigError("coupling stiffness/damping must be >= 0")


def coupling_forces(coupling: ObjectCoupling, state_a: AxisState, state_b: AxisState):
    """Equal-and-opposite spring-damper forces along the separation.

    Returns (force on a, force on b) with f_a == -f_b bitwise. Below a
    degenerate separation the direction falls back to the previous tick's.
    """
    delta = state_b.x - state_a.x
    sep = float(np.linalg.norm(delta))
    if sep < DEGENERATE_SEP:
        if coupling._last_direction is None:
            direction = np.zeros_like(delta)
            direction[0] = 1.0
        else:
            direction = coupling._last_direction
    else:
        direction = delta / sep
        coupling._last_direction = direction
    sep_rate = float(np.dot(state_b.v - state_a.v, direction))
    magnitude = coupling.stiffness * (sep - coupling.rest_length) + coupling.damping * sep_rate
    f_a = magnitude * direction
    return f_a, -f_a


def min_jerk(p0, p1, t0: float, t1: float, t: float):
    """Minimum-jerk point-to-point position and velocity, clamped outside
    [t0, t1]; C1 by construction."""
    p0 = np.asarray(p0, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    if t <= t0:
        return p0.copy(), np.zeros_like(p0)
    if t >= t1:
        return p1.copy(), np.zeros_like(p1)
    T = t1 - t0
    s = (t - t0) / T
    blend = 10 * s**3 - 15 * s**4 + 6 * s**5
    dblend = (30 * s**2 - 60 * s**3 + 30 * s**4) / T
    return p0 + (p1 - p0) * blend, (p1 - p0) * dblend


@dataclass
class TrajectorySegment:
    kind: str                 # "min_jerk" | "sinusoid" | "hold"
    t0: float = 0.0
    t1: float = math.inf
    start: np.ndarray = None  # min_jerk / hold
    end: np.ndarray = None    # min_jerk
    center: np.ndarray = None  # sinusoid
    amplitude: np.ndarray = None
    period: float = 1.0
    axis_phase: np.ndarray = None  # per-axis phase offset (rad)


@dataclass
class ScriptedTrajectory:
    """Piecewise C1 trajectory: time-ordered segments, held between them."""

    segments: list

    def sample(self, t: float):
        seg = None
        for s in self.segments:
            if t >= s.t0:
                seg = s
            else:
                break
        if seg is None:
            seg = self.segments[0]
            return np.asarray(seg.start if seg.start is not None else seg.center,
                              dtype=float).copy(), np.zeros(self.dof)
        if seg.kind == "hold":
            return np.asarray(seg.start, dtype=float).copy(), np.zeros(self.dof)
        if seg.kind == "min_jerk":
            return min_jerk(seg.start, seg.end, seg.t0, seg.t1, t)
        if seg.kind == "sinusoid":
            w = 2 * math.pi / seg.period
            phase = seg.axis_phase if seg.axis_phase is not None else np.zeros(self.dof)
            tau = t - seg.t0
            amp = np.asarray(seg.amplitude, dtype=float)
            center = np.asarray(seg.center, dtype=float)
            # 1-cos form starts at `center` at rest, so entry is C1 when the
            # previous segment parks there; swings to center + 2*amp
            x = center + amp * (1.0 - np.cos(w * tau + phase))
            v = amp * w * np.sin(w * tau + phase)
            return x, v
        raise ConfigError(f"unknown trajectory segment kind {seg.kind!r}")

    @property
    def dof(self) -> int:
        s = self.segments[0]
        ref = s.start if s.start is not None else s.center
        return len(np.atleast_1d(ref))


@dataclass
class OperatorModel:
    """Stand-in for the human arm: either drives the master position directly
    (scripted) or pulls it with a hand impedance toward a target trajectory."""

    kind: str = "impedance"   # "scripted" | "impedance"
    k_h: float = 100.0
    b_h: float = 10.0
    trajectory: ScriptedTrajectory = None

    def __post_init__(self):
        if self.kind not in ("scripted", "impedance"):
            raise ConfigError(f"operator kind must be scripted|impedance, got {self.kind!r}")
        if self.k_h < 0 or self.b_h < 0:
            raise ConfigError("operator impedance gains must be >= 0")


def operator_force(model: OperatorModel, master_state: AxisState, t: float) -> np.ndarray:
    """Impedance operator hand force f_h = k_h*(x_target(t) - x_m) - b_h*v_m.

    For scripted operators the master is position-driven and f_h is the
    constraint force, computed by the session (it needs the other forces on
    the master); this function covers the impedance kind.
    """
    if model.kind != "impedance":
        raise ConfigError("operator_force applies to impedance operators; "
                          "scripted masters report the constraint force instead")
    x_t, v_t = model.trajectory.sample(t)
    return model.k_h * (x_t - master_state.x) - model.b_h * master_state.v
