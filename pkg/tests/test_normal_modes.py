from __future__ import annotations

import numpy as np
import pytest

from src.bloch.normal_modes import from_normal_modes, to_normal_modes
from src.core.errors import UndefinedBasisError


def _complex(rng, n):
    return rng.normal(size=n) + 1j * rng.normal(size=n)


def test_transform_is_unitary():
    rng = np.random.default_rng(7)
    p, s, c, d = (_complex(rng, 1000) for _ in range(4))
    modes = to_normal_modes(p, s, c, d)

    power_in = np.abs(p) ** 2 + np.abs(s) ** 2
    power_modes = np.abs(modes.omega_T) ** 2 + np.abs(modes.omega_D) ** 2
    assert np.max(np.abs(power_modes - power_in) / power_in) < 1e-12

    p_back, s_back = from_normal_modes(modes, c, d)
    assert np.max(np.abs(p_back - p)) < 1e-12
    assert np.max(np.abs(s_back - s)) < 1e-12


def test_intensity_balance_nulls_dissipation_mode():
    c, d = 0.39, 0.41
    p = 0.01
    s = p * d / c
    modes = to_normal_modes(p, s, c, d)
    assert abs(modes.omega_D) < 1e-16
    assert modes.omega_T == pytest.approx(np.hypot(p, s))


def test_scalar_inputs_give_scalars():
    modes = to_normal_modes(1.0, 0.0, 1.0, 0.0)
    assert modes.omega_T == 1.0
    assert modes.omega_D == 0.0
    assert modes.omega_tot == 1.0


def test_zero_controls_undefined():
    with pytest.raises(UndefinedBasisError):
        to_normal_modes(0.01, 0.0, 0.0, 0.0)
    with pytest.raises(UndefinedBasisError):
        from_normal_modes(to_normal_modes(0.01, 0.0, 1.0, 0.0), np.zeros(1), np.zeros(1))
