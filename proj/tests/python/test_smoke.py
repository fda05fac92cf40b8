import math

import pytest

import eabf


def test_reference_setting():
    m = eabf.evaluate_setting(eabf.BarringSetting(0.7, 8000), eabf.Scenario(), eabf.EnergyConfig())
    assert 0.0 < m.success_probability <= 1.0
    assert m.mean_access_delay_ms > 24.0
    assert m.mean_cycle_energy_j > 0.0


def test_intensities_normalize():
    scenario = eabf.Scenario()
    lam = eabf.access_intensities(scenario.profile, float(scenario.rach_period_ms))
    assert math.isclose(sum(lam), scenario.profile.population, abs_tol=1e-4)


def test_recursion_trace():
    scenario = eabf.Scenario()
    scenario.profile.population = 500
    scenario.profile.activation_span_ms = 1000.0
    trace = eabf.run_recursion(eabf.BarringSetting(0.5, 100), scenario)
    assert set(trace) >= {"slot", "attempts", "collisions", "successes"}
    assert all(c <= a for a, c in zip(trace["attempts"], trace["collisions"]))


def test_monte_carlo_is_reproducible():
    scenario = eabf.Scenario()
    scenario.profile.population = 300
    scenario.profile.activation_span_ms = 1000.0
    s = eabf.BarringSetting(0.7, 100)
    a = eabf.run_monte_carlo(s, scenario, eabf.EnergyConfig(), eabf.SimOptions(), replications=4, seed=3)
    b = eabf.run_monte_carlo(s, scenario, eabf.EnergyConfig(), eabf.SimOptions(), replications=4, seed=3)
    assert a.success_probability.mean == b.success_probability.mean
    assert a.replications == 4


def test_small_sweep_and_optimum():
    scenario = eabf.Scenario()
    scenario.profile.population = 2000
    grid = eabf.GridSpec()
    grid.barring_factor_low = 0.1
    grid.barring_factor_high = 0.3
    grid.barring_factor_step = 0.1
    grid.backoff_max_ms = 300
    table = eabf.sweep_grid(grid, scenario, eabf.EnergyConfig())
    assert len(table) == 9
    best = eabf.minimize_energy(table, eabf.ConstraintSpec(0.0, 50000.0))
    assert best.feasible
    curve = eabf.tradeoff_curve(table, [0.0, 0.5], 50000.0)
    assert len(curve) == 2


def test_errors_and_hash():
    with pytest.raises(eabf.DomainError):
        eabf.evaluate_setting(eabf.BarringSetting(0.5, 7), eabf.Scenario(), eabf.EnergyConfig())
    assert len(eabf.config_hash("")) == 16
    assert len(eabf.standard_settings()) == 3
