"""Closed-form steady solutions (γ21 = 0, γ31 = γ41), used as oracles.

Sine/cosine modulation, Ω_c = Ω_0 cos βz, Ω_d = Ω_0 sin βz: in the rotating
normal-mode basis the transmission mode obeys T'' + ηT' + β²T = 0 with
T(0) = 1, T'(0) = 0, and D = T'/β. With η = α/2L and κ = √((η/2)² − β²):

    |Ω_D|² = (β²/κ²) sinh²(κz) e^{−ηz}
    |Ω_T|² = [cosh κz + (η/2κ) sinh κz]² e^{−ηz}

At z = L the controls are (0, Ω_0), so Ω_p = −Ω_D and Ω_s = Ω_T there.
κ is taken complex, so the oscillating branch ((η/2)² < β²) needs no special case.
"""

from __future__ import annotations

import math

import numpy as np

BETA = math.pi / 2.0
_KAPPA_EPS = 1e-12


def _sincos_modes(alpha: float, z) -> tuple[np.ndarray, np.ndarray]:
    """Normalised TM and DM amplitudes (real) along the modulated medium."""
    z = np.asarray(z, dtype=float)
    eta = alpha / 2.0
    kappa = np.sqrt(complex((eta / 2.0) ** 2 - BETA**2))
    # e^{-ηz/2} cosh κz and e^{-ηz/2} sinh(κz)/κ without overflow
    grow = np.exp((kappa - eta / 2.0) * z)
    decay = np.exp(-(kappa + eta / 2.0) * z)
    damped_cosh = 0.5 * (grow + decay)
    if abs(kappa) < _KAPPA_EPS:
        damped_sinc = z * np.exp(-eta * z / 2.0)
    else:
        damped_sinc = 0.5 * (grow - decay) / kappa
    omega_T = (damped_cosh + 0.5 * eta * damped_sinc).real
    omega_D = (-BETA * damped_sinc).real
    return omega_T, omega_D


def analytic_sincos(alpha: float, z=1.0) -> tuple[np.ndarray | float, np.ndarray | float]:
    """(|Ω_p|², |Ω_s|²) as written in the closed-form sin/cos solution, for |Ω_p0|² = 1.

    These are the DM and TM intensities; they equal the probe and signal
    intensities at z = L only. Use sincos_fields for the fields at any z.
    """
    omega_T, omega_D = _sincos_modes(alpha, z)
    probe, signal = omega_D**2, omega_T**2
    if np.ndim(probe) == 0:
        return float(probe), float(signal)
    return probe, signal


def sincos_fields(alpha: float, z) -> tuple[np.ndarray, np.ndarray]:
    """Probe and signal amplitudes (real, Ω_p0 = 1) at arbitrary z for the sin/cos profile."""
    z_arr = np.asarray(z, dtype=float)
    omega_T, omega_D = _sincos_modes(alpha, z_arr)
    cos_b, sin_b = np.cos(BETA * z_arr), np.sin(BETA * z_arr)
    return cos_b * omega_T - sin_b * omega_D, sin_b * omega_T + cos_b * omega_D


def sincos_large_od(alpha: float) -> tuple[float, float]:
    """Large-OD limits of the z = L outputs: (π²/α²)(1 − e^{−α/2})² and 1 − π²/α."""
    probe = math.pi**2 / alpha**2 * (1.0 - math.exp(-alpha / 2.0)) ** 2
    signal = 1.0 - math.pi**2 / alpha
    return probe, signal


def uniform_closed_form(alpha: float, z=1.0, omega_p0: complex = 1.0):
    """(Ω_T, Ω_D, Ω_p, Ω_s) for equal uniform controls and γ21 = 0.

    Ω_T stays at Ω_p0/√2 while Ω_D = −(Ω_p0/√2) e^{−αz/2L} is absorbed, so the
    output signal tends to Ω_p0/2: a 25% conversion ceiling.
    """
    z = np.asarray(z, dtype=float)
    decay = np.exp(-0.5 * alpha * z)
    omega_T = omega_p0 / math.sqrt(2.0) * np.ones_like(decay)
    omega_D = -omega_p0 / math.sqrt(2.0) * decay
    omega_p = 0.5 * omega_p0 * (1.0 + decay)
    omega_s = 0.5 * omega_p0 * (1.0 - decay)
    if z.ndim == 0:
        return complex(omega_T), complex(omega_D), complex(omega_p), complex(omega_s)
    return omega_T, omega_D, omega_p, omega_s


def uniform_conversion_limit(alpha: float) -> float:
    return 0.25 * (1.0 - math.exp(-alpha / 2.0)) ** 2
