from __future__ import annotations

import math

import numpy as np
import pytest

from src.core.errors import ConvergenceError
from src.core.params import PhysParams
from src.geometry.profiles import profile_sincos, profile_uniform
from src.propagation.analytic import analytic_sincos, uniform_closed_form, uniform_conversion_limit
from src.propagation.steady_state import integrate_steady, sweep_od


@pytest.mark.parametrize("alpha", [5.0, 19.0, 50.0, 120.0, 240.0])
def test_sincos_profile_matches_closed_form(alpha):
    params = PhysParams(alpha=alpha)
    sol = integrate_steady(profile_sincos(1.0), params, 0.01)
    t_p, ce = analytic_sincos(alpha)
    assert abs(sol.CE - ce) < 1e-6
    assert abs(sol.T_p - t_p) < 1e-6
    assert sol.checks.converged and sol.checks.passive


def test_headline_conversion_at_od_240():
    sol = integrate_steady(profile_sincos(1.0), PhysParams(alpha=240.0), 0.01)
    assert sol.CE == pytest.approx(0.9601, abs=5e-4)


@pytest.mark.parametrize("alpha", [1.0, 19.0, 100.0])
def test_uniform_controls_hit_conversion_limit(alpha):
    sol = integrate_steady(profile_uniform(0.5, 0.5), PhysParams(alpha=alpha), 0.01)
    assert abs(sol.CE - uniform_conversion_limit(alpha)) < 1e-6
    assert sol.CE < 0.25


def test_uniform_normal_modes_follow_closed_form():
    alpha = 19.0
    profile = profile_uniform(0.26, 0.26)
    sol = integrate_steady(profile, PhysParams(alpha=alpha), 0.01)
    modes = sol.normal_modes(profile)
    z = sol.fields.z_grid
    omega_T, omega_D, _, _ = uniform_closed_form(alpha, z, 0.01)

    assert np.allclose(modes.omega_T, modes.omega_T[0], rtol=1e-10)
    assert np.max(np.abs(modes.omega_D / omega_D - 1.0)) < 1e-8


def test_no_driving_field_means_no_signal(params):
    sol = integrate_steady(profile_uniform(0.26, 0.0), params, 0.01)
    assert sol.CE == 0.0
    assert np.all(sol.fields.omega_s == 0)


def test_two_level_absorption():
    sol = integrate_steady(profile_uniform(0.0, 0.0), PhysParams(alpha=2.0), 0.01)
    assert sol.T_p == pytest.approx(math.exp(-2.0), rel=1e-8)


def test_power_never_increases_along_z():
    rng = np.random.default_rng(11)
    for _ in range(50):
        gamma = rng.uniform(1.0, 1.5)
        params = PhysParams(
            alpha=rng.uniform(1.0, 50.0), gamma31=gamma, gamma41=gamma, gamma21=rng.uniform(0.0, 1e-3)
        )
        c = rng.uniform(0.0, 1.0) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        d = rng.uniform(0.0, 1.0) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        sol = integrate_steady(profile_uniform(c, d), params, 0.01, n_z=401, check_convergence=False)
        power = np.abs(sol.fields.omega_p) ** 2 + np.abs(sol.fields.omega_s) ** 2
        assert np.all(np.diff(power) <= 1e-12 * power[0])
        assert sol.T_p + sol.CE <= 1.0 + 1e-9


def test_signal_injection_mirrors_probe_injection(params):
    profile = profile_uniform(0.3, 0.3)
    probe_in = integrate_steady(profile, params, 0.01)
    signal_in = integrate_steady(profile, params, 0.0, omega_s0=0.01)
    assert signal_in.T_p == pytest.approx(probe_in.CE, rel=1e-12)
    assert signal_in.CE == pytest.approx(probe_in.T_p, rel=1e-12)


def test_zero_input_rejected(params):
    with pytest.raises(ValueError):
        integrate_steady(profile_uniform(0.3, 0.3), params, 0.0)


def test_coarse_grid_fails_refinement_check():
    with pytest.raises(ConvergenceError):
        integrate_steady(profile_sincos(1.0), PhysParams(alpha=240.0), 0.01, n_z=5)


def test_od_sweep_keeps_order_and_matches_single_runs():
    profile = profile_sincos(1.0)
    base = PhysParams(alpha=1.0)
    table = sweep_od([50.0, 10.0, 19.0], profile, base, n_z=801, check_convergence=False)
    assert list(table["alpha"]) == [50.0, 10.0, 19.0]
    single = integrate_steady(profile, PhysParams(alpha=19.0), 0.01, n_z=801, check_convergence=False)
    assert table.loc[2, "CE"] == single.CE
    assert table["converged"].isna().all()
    assert single.checks.converged is None


def test_od_sweep_in_workers_is_identical():
    profile = profile_uniform(0.39, 0.41)
    base = PhysParams(alpha=1.0, gamma21=8e-4)
    serial = sweep_od([5.0, 19.0, 40.0], profile, base, n_z=401, check_convergence=False, jobs=1)
    parallel = sweep_od([5.0, 19.0, 40.0], profile, base, n_z=401, check_convergence=False, jobs=2)
    assert serial.equals(parallel)


def test_od_sweep_rejects_non_positive_alpha(params):
    with pytest.raises(ValueError):
        sweep_od([1.0, 0.0], profile_uniform(0.3, 0.3), params)
