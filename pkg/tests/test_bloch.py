from __future__ import annotations

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from src.bloch.coherences import bloch_generator, steady_coherences
from src.core.errors import SingularSystemError
from src.core.params import PhysParams


def _linear_solve(p, s, c, d, params):
    m = bloch_generator(c, d, params)
    return np.linalg.solve(m, -0.5j * np.array([p, s, 0.0]))


@pytest.mark.parametrize(
    "p, s, c, d, gamma21",
    [
        (0.01, 0.0, 0.26, 0.0, 5e-4),
        (0.01, 0.0, 0.26, 0.26, 1e-3),
        (0.01, 0.004j, 0.39, 0.41, 8e-4),
        (0.02 - 0.01j, 0.003, 0.5 + 0.2j, 0.1 - 0.3j, 0.0),
    ],
)
def test_closed_form_matches_linear_solve(p, s, c, d, gamma21):
    params = PhysParams(alpha=19.0, gamma31=1.25, gamma41=1.1, gamma21=gamma21)
    rho = steady_coherences(p, s, c, d, params)
    expected = _linear_solve(p, s, c, d, params)
    assert np.allclose(rho.as_tuple(), expected, rtol=1e-12, atol=1e-15)


def test_long_time_limit_of_bloch_equations():
    params = PhysParams(alpha=19.0, gamma21=8e-4)
    c, d, p, s = 0.5, 0.3, 0.01, 0.002
    m = bloch_generator(c, d, params)
    drive = 0.5j * np.array([p, s, 0.0])

    sol = solve_ivp(
        lambda t, y: m @ y + drive,
        (0.0, 400.0),
        np.zeros(3, dtype=complex),
        method="DOP853",
        rtol=1e-10,
        atol=1e-14,
    )
    rho = steady_coherences(p, s, c, d, params)
    assert np.allclose(sol.y[:, -1], rho.as_tuple(), rtol=1e-6, atol=1e-12)


def test_linear_in_the_weak_fields(params):
    base = steady_coherences(0.01, 0.002j, 0.4, 0.3, params)
    scaled = steady_coherences(0.03, 0.006j, 0.4, 0.3, params)
    assert np.allclose(np.array(scaled.as_tuple()), 3 * np.array(base.as_tuple()), rtol=1e-13)


def test_no_controls_gives_two_level_response(params):
    rho = steady_coherences(0.01, 0.0, 0.0, 0.0, params)
    assert rho.rho21 == 0
    assert rho.rho31 == pytest.approx(1j * 0.01 / params.gamma31)


def test_eit_dark_state_without_dephasing(params):
    # probe and coupling alone, gamma21 = 0: rho31 vanishes, rho21 = -p/c
    rho = steady_coherences(0.01, 0.0, 0.26, 0.0, params)
    assert abs(rho.rho31) < 1e-15
    assert rho.rho21 == pytest.approx(-0.01 / 0.26)


def test_broadcasts_over_arrays(params):
    c = np.linspace(0.1, 1.0, 7)
    rho = steady_coherences(0.01, 0.0, c, c[::-1], params)
    assert rho.rho31.shape == (7,)
    for i in range(7):
        single = steady_coherences(0.01, 0.0, c[i], c[::-1][i], params)
        assert rho.rho41[i] == pytest.approx(single.rho41, rel=1e-14)


def test_non_finite_input_raises(params):
    with pytest.raises(SingularSystemError):
        steady_coherences(np.inf, 0.0, 0.3, 0.2, params)


def test_swapping_the_two_lambda_systems_swaps_the_optical_coherences():
    p, s, c, d = 0.01 - 0.002j, 0.004j, 0.39 + 0.1j, 0.41
    params = PhysParams(alpha=19.0, gamma31=1.25, gamma41=1.1, gamma21=8e-4)
    swapped = params.updated(gamma31=1.1, gamma41=1.25)
    rho = steady_coherences(p, s, c, d, params)
    mirror = steady_coherences(s, p, d, c, swapped)
    assert mirror.rho31 == pytest.approx(rho.rho41, rel=1e-13)
    assert mirror.rho41 == pytest.approx(rho.rho31, rel=1e-13)
    assert mirror.rho21 == pytest.approx(rho.rho21, rel=1e-13)


def test_response_is_linear_in_the_weak_fields():
    params = PhysParams(alpha=19.0, gamma21=5e-4)
    c, d = 0.3 + 0.05j, 0.25 - 0.1j
    first = steady_coherences(0.01, 0.002j, c, d, params)
    second = steady_coherences(-0.004j, 0.007, c, d, params)
    both = steady_coherences(0.01 - 0.004j, 0.007 + 0.002j, c, d, params)
    for name in ("rho31", "rho41", "rho21"):
        total = getattr(first, name) + getattr(second, name)
        assert getattr(both, name) == pytest.approx(total, rel=1e-12, abs=1e-16)
