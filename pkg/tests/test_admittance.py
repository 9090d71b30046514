import math

import numpy as np
import pytest

from telecell.admittance import (AdmittanceParams, admittance_accel,
                                 reshape_inertia, stored_energy)
from telecell.core import AxisState, ConfigError, integrate_step


def test_per_axis_broadcasts_scalars():
    p = AdmittanceParams.per_axis(2.0, 3.0, 10.0, dof=3)
    assert np.array_equal(p.M, [2.0, 2.0, 2.0])
    assert np.array_equal(p.K, [10.0, 10.0, 10.0])


def test_per_axis_validation():
    with pytest.raises(ConfigError):
        AdmittanceParams.per_axis(0.0, 1.0, 1.0, dof=1)
    with pytest.raises(ConfigError):
        AdmittanceParams.per_axis(1.0, -1.0, 1.0, dof=1)
    with pytest.raises(ConfigError):
        AdmittanceParams.per_axis([1.0, 2.0], 1.0, 1.0, dof=3)


def test_accel_formula():
    p = AdmittanceParams.per_axis(2.0, 3.0, 10.0, dof=1, x_ref=[0.5])
    a = admittance_accel(p, AxisState.of([0.7], [0.1]), [1.0])
    assert a[0] == pytest.approx((1.0 - 3.0 * 0.1 - 10.0 * 0.2) / 2.0)


def test_step_response_matches_analytic_solution():
    """Underdamped second-order step: x(t) from the textbook formula."""
    M, B, K, f = 2.0, 3.0, 10.0, 1.0
    dt = 0.001
    wn = math.sqrt(K / M)
    zeta = B / (2.0 * math.sqrt(K * M))
    wd = wn * math.sqrt(1.0 - zeta**2)
    x_ss = f / K

    state = AxisState.zeros(1)
    p = AdmittanceParams.per_axis(M, B, K, dof=1)
    worst = 0.0
    for k in range(int(10.0 / dt)):
        state = integrate_step(state, admittance_accel(p, state, [f]), dt)
        t = (k + 1) * dt
        e = math.exp(-zeta * wn * t)
        x_ref = x_ss * (1.0 - e * (math.cos(wd * t) + zeta * wn / wd * math.sin(wd * t)))
        worst = max(worst, abs(state.x[0] - x_ref))
    assert worst <= 1e-3 * x_ss


def test_reshape_lightens_apparent_mass():
    state = AxisState.of([0.0], [0.0])
    cmd = reshape_inertia(2.0, 1.0, [3.0], state, b_fc=0.0)
    # total force 3 + cmd accelerates the 2 kg plant at 3/1 m/s^2
    assert (3.0 + cmd[0]) / 2.0 == pytest.approx(3.0 / 1.0)


def test_reshape_validation():
    state = AxisState.zeros(1)
    with pytest.raises(ConfigError):
        reshape_inertia(2.0, 3.0, [1.0], state)  # heavier than physical
    with pytest.raises(ConfigError):
        reshape_inertia(2.0, 0.0, [1.0], state)
    with pytest.raises(ConfigError):
        reshape_inertia(2.0, 1.0, [1.0], state, b_fc=-1.0)


def test_stored_energy():
    p = AdmittanceParams.per_axis(2.0, 0.0, 10.0, dof=1, x_ref=[0.0])
    e = stored_energy(p, AxisState.of([0.1], [0.5]))
    assert e == pytest.approx(0.5 * 2.0 * 0.25 + 0.5 * 10.0 * 0.01)
