import numpy as np
import pytest

from telecell.core import (AxisState, ConfigError, SimConfig, SimulationFault,
                           Tick, integrate_step, require_finite, run_session)


def test_tick_time_is_multiplied_not_summed():
    # k * dt has one rounding, so tick 3000 at 1 ms is exactly 3.0 s
    assert Tick(3000, 0.001).time == 3000 * 0.001
    acc = 0.0
    for _ in range(3000):
        acc += 0.001
    assert acc != 3.0 and Tick(3000, 0.001).time == pytest.approx(3.0)


def test_sim_config_validation():
    with pytest.raises(ConfigError):
        SimConfig(dt=0.0)
    with pytest.raises(ConfigError):
        SimConfig(duration=-1.0)
    with pytest.raises(ConfigError):
        SimConfig(dof=4)
    with pytest.raises(ConfigError):
        SimConfig(seed=-1)


def test_n_ticks_floors():
    assert SimConfig(dt=0.001, duration=0.0105).n_ticks == 10
    assert SimConfig(dt=0.001, duration=0.0).n_ticks == 0


def test_integrate_step_is_semi_implicit():
    s = AxisState.of([1.0], [2.0])
    out = integrate_step(s, np.array([3.0]), 0.1)
    v = 2.0 + 3.0 * 0.1
    assert out.v[0] == v
    assert out.x[0] == 1.0 + v * 0.1  # uses the *updated* velocity


def test_symplectic_oscillator_energy_bounded():
    # undamped spring-mass: explicit Euler blows up, semi-implicit stays bounded
    k, m, dt = 100.0, 1.0, 0.001
    s = AxisState.of([0.1], [0.0])
    e0 = 0.5 * k * 0.1**2
    for _ in range(100_000):
        s = integrate_step(s, -k / m * s.x, dt)
    e = 0.5 * m * s.v[0] ** 2 + 0.5 * k * s.x[0] ** 2
    assert abs(e - e0) / e0 < 0.02


def test_require_finite_names_module_and_tick():
    with pytest.raises(SimulationFault) as err:
        require_finite(np.array([1.0, np.nan]), "plant.left", 42)
    assert err.value.module == "plant.left"
    assert err.value.tick == 42
    assert "plant.left" in str(err.value)


class _Wiring:
    def __init__(self, fail_at=None):
        self.fail_at = fail_at

    def header(self):
        return {"config": {"sim": {"dt": 0.001}}}

    def validate(self):
        pass

    def step(self, tick):
        if self.fail_at is not None and tick.index == self.fail_at:
            raise SimulationFault("stub", tick.index)
        return {"tick": tick.index, "time": tick.time, "arms": []}


def test_run_session_executes_every_tick_in_order():
    series = run_session(SimConfig(duration=0.01), _Wiring())
    assert [r["tick"] for r in series.records] == list(range(10))
    assert series.fault is None


def test_run_session_zero_duration_is_empty():
    series = run_session(SimConfig(duration=0.0), _Wiring())
    assert len(series.records) == 0


def test_run_session_captures_fault_and_truncates():
    series = run_session(SimConfig(duration=0.01), _Wiring(fail_at=5))
    assert len(series.records) == 5
    assert series.fault["module"] == "stub"
    assert series.fault["tick"] == 5
