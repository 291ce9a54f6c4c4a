"""Transmission-mode / dissipation-mode change of basis.

    (Ω_T, Ω_D)ᵀ = (1/Ω_tot) [[Ω_c*, Ω_d*], [−Ω_d, Ω_c]] (Ω_p, Ω_s)ᵀ,   Ω_tot = √(|Ω_c|² + |Ω_d|²)

The matrix is unitary, so the inverse is its conjugate transpose.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from src.core.errors import UndefinedBasisError


@dataclass(frozen=True, eq=False)
class NormalModes:
    omega_T: complex | np.ndarray
    omega_D: complex | np.ndarray
    omega_tot: float | np.ndarray


def _controls(omega_c, omega_d) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    c = np.asarray(omega_c, dtype=complex)
    d = np.asarray(omega_d, dtype=complex)
    tot = np.sqrt(np.abs(c) ** 2 + np.abs(d) ** 2)
    if np.any(tot == 0.0):
        raise UndefinedBasisError("normal modes are undefined where both control fields vanish")
    return c, d, tot


def _squeeze(x: np.ndarray):
    return x.item() if x.ndim == 0 else x


def to_normal_modes(omega_p, omega_s, omega_c, omega_d) -> NormalModes:
    c, d, tot = _controls(omega_c, omega_d)
    p = np.asarray(omega_p, dtype=complex)
    s = np.asarray(omega_s, dtype=complex)
    omega_T = (np.conj(c) * p + np.conj(d) * s) / tot
    omega_D = (-d * p + c * s) / tot
    return NormalModes(_squeeze(omega_T), _squeeze(omega_D), _squeeze(tot))


def from_normal_modes(modes: NormalModes, omega_c, omega_d) -> tuple:
    """Return (Ω_p, Ω_s) for the given TM/DM amplitudes and controls."""
    c, d, tot = _controls(omega_c, omega_d)
    T = np.asarray(modes.omega_T, dtype=complex)
    D = np.asarray(modes.omega_D, dtype=complex)
    omega_p = (c * T - np.conj(d) * D) / tot
    omega_s = (d * T + np.conj(c) * D) / tot
    return _squeeze(omega_p), _squeeze(omega_s)
