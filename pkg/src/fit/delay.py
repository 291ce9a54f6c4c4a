"""Slow-light delay of the probe and its inversion to an optical density.

For Ω_d = 0 the zero-frequency group delay through the medium follows from
the steady response of the Bloch equations:

    τ = α γ31 (W − g²) / (4 (a g + W)²),   W = |Ω_c|²/4, a = γ31/2, g = γ21/2

which is the familiar τ = α γ31 / |Ω_c|² when γ21 = 0.
"""

from __future__ import annotations

from src.core.errors import ConfigError


def _terms(omega_c: float, gamma31: float, gamma21: float) -> tuple[float, float, float]:
    if not omega_c > 0:
        raise ConfigError(f"omega_c must be positive, got {omega_c}")
    if not gamma31 > 0:
        raise ConfigError(f"gamma31 must be positive, got {gamma31}")
    if not gamma21 >= 0:
        raise ConfigError(f"gamma21 must be non-negative, got {gamma21}")
    w = abs(omega_c) ** 2 / 4.0
    a = gamma31 / 2.0
    g = gamma21 / 2.0
    if w <= g * g:
        raise ConfigError(
            f"no slow light: |omega_c|^2/4 = {w:g} does not exceed (gamma21/2)^2 = {g * g:g}"
        )
    return w, a, g


def group_delay(alpha: float, omega_c: float, gamma31: float, gamma21: float = 0.0) -> float:
    """EIT group delay in units of 1/Γ."""
    w, a, g = _terms(omega_c, gamma31, gamma21)
    return alpha * gamma31 * (w - g * g) / (4.0 * (a * g + w) ** 2)


def od_from_delay(delay: float, omega_c: float, gamma31: float, gamma21: float = 0.0) -> float:
    """Optical density that produces the measured delay (units of 1/Γ)."""
    if not delay >= 0:
        raise ConfigError(f"delay must be non-negative, got {delay}")
    w, a, g = _terms(omega_c, gamma31, gamma21)
    return 4.0 * delay * (a * g + w) ** 2 / (gamma31 * (w - g * g))
