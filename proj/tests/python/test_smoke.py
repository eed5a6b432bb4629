import math

import numpy as np
import pytest

import remest


def test_open_loop_cost():
    assert remest.Plant(a=1.0, sigma2=1.0, horizon=2).open_loop_cost() == pytest.approx(3.0)
    assert remest.Plant(a=1.1, sigma2=1.0, horizon=3).open_loop_cost() == pytest.approx(6.8841)


def test_energy_channel():
    ch = remest.energy_harvesting(4, 2, 0.3)
    assert ch.num_states == 5
    assert ch.violations() == []
    assert ch.step(4, 1) == 2
    with pytest.raises(RuntimeError):
        ch.step(0, 1)


def test_invalid_channel_reports_violation():
    ch = remest.channel([(0, 0)], [1.2], 0, [True])
    assert any("probability out of range" in reason for _, reason in ch.violations())
    with pytest.raises(ValueError):
        remest.solve_symmetric(remest.Plant(1.0, 1.0, 2), ch, num_points=201)


def test_symmetric_solution():
    plant = remest.Plant(a=1.1, sigma2=1.0, horizon=6)
    sol = remest.solve_symmetric(plant, remest.energy_harvesting(4, 2, 0.3), num_points=801)
    assert sol.not_threshold_reachable == 0
    assert sol.structure_ok()
    v = sol.V(1, 4)
    assert isinstance(v, np.ndarray) and v.shape == sol.grid.shape
    np.testing.assert_allclose(v, v[::-1], rtol=0, atol=1e-9 * np.ptp(v))
    assert math.isinf(sol.threshold(3, 0))
    total, se = sol.simulate(20000, seed=4)
    assert abs(total - sol.value) <= 3 * se


def test_useless_channel_matches_closed_form():
    plant = remest.Plant(a=1.0, sigma2=1.0, horizon=2)
    sol = remest.solve_symmetric(plant, remest.constant_channel(1.0), num_points=401)
    assert sol.value == pytest.approx(3.0, rel=1e-9)
    total, se = remest.simulate_uniform(plant, remest.constant_channel(1.0), "never", 50000, 2)
    assert abs(total - 3.0) <= 3 * se
    total, se = remest.simulate_uniform(plant, remest.constant_channel(0.0), "always", 1000, 2)
    assert total == 0.0


def test_white_process_solver():
    assert remest.iid_stage_cost(1.0, 0.5, 0.0, math.inf) == pytest.approx(0.75 * (1 - 2 / math.pi))
    lo, hi, obj = remest.optimize_interval(1.0, 0.3, 0.0)
    assert obj < 0.3
    res = remest.solve_iid(remest.energy_harvesting(4, 2, 0.3), 1.0, 3)
    assert res["value"] > 0
    assert len(res["intervals"]) == 15


def test_discrete_oracle():
    dp, ex = remest.discrete_check([(-1.0, 0.25), (0.0, 0.5), (1.0, 0.25)], remest.energy_harvesting(1, 1, 0.3), 2)
    assert dp == pytest.approx(ex, abs=1e-12)
