"""Remote-side admittance law and local apparent-inertia reshaping.

The remote arm is commanded as a virtual mechanical system: the desired
end-effector acceleration solves M*a + B*v + K*(x - x_ref) = f_ext
componentwise for diagonal M, B, K. In bilateral wiring x_ref tracks the
transmitted master position, which makes the K term the position-tracking
channel.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import AxisState, ConfigError


def _diag(value, dof: int) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(value, dtype=float))
    if arr.size == 1:
        arr = np.full(dof, float(arr[0]))
    if arr.size != dof:
        raise ConfigError(f"admittance parameter length {arr.size} != dof {dof}")
    return arr


@dataclass
class AdmittanceParams:
    """Diagonal virtual mass/damping/stiffness, per axis."""

    M: np.ndarray
    B: np.ndarray
    K: np.ndarray
    x_ref: np.ndarray = None

    @classmethod
    def per_axis(cls, M, B, K, dof: int, x_ref=None) -> "AdmittanceParams":
        M = _diag(M, dof)
        B = _diag(B, dof)
        K = _diag(K, dof)
        if np.any(M <= 0):
            raise ConfigError(f"admittance M must be > 0 per axis, got {M}")
        if np.any(B < 0) or np.any(K < 0):
            raise ConfigError("admittance B and K must be >= 0")
        if x_ref is None:
            x_ref = np.zeros(dof)
        return cls(M, B, K, np.asarray(x_ref, dtype=float))


def admittance_accel(params: AdmittanceParams, state: AxisState, f_ext) -> np.ndarray:
    """Desired acceleration a = M^-1 * (f_ext - B*v - K*(x - x_ref))."""
    f = np.asarray(f_ext, dtype=float)
    return (f - params.B * state.v - params.K * (state.x - params.x_ref)) / params.M


def reshape_inertia(physical_mass: float, desired_mass: float, measured_f,
                    state: AxisState, b_fc: float = 0.0) -> np.ndarray:
    """Command force making a physical_mass plant feel like desired_mass.

    command = (physical/desired - 1) * measured_f - b_fc * v; with the
    command applied alongside measured_f, the closed loop accelerates at
    measured_f / desired_mass (minus the small stabilizing damping b_fc).
    Only lightening is allowed: 0 < desired_mass <= physical_mass.
    """
    if not (0 < desired_mass <= physical_mass):
        raise ConfigError(
            f"desired_mass must be in (0, physical_mass={physical_mass}], got {desired_mass}")
    if b_fc < 0:
        raise ConfigError("reshape damping b_fc must be >= 0")
    f = np.asarray(measured_f, dtype=float)
    return (physical_mass / desired_mass - 1.0) * f - b_fc * state.v


def stored_energy(params: AdmittanceParams, state: AxisState) -> float:
    """Energy of the virtual system: 0.5*M*v^2 + 0.5*K*(x-x_ref)^2."""
    dx = state.x - params.x_ref
    return float(0.5 * np.sum(params.M * state.v**2) + 0.5 * np.sum(params.K * dx**2))
