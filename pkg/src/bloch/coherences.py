"""On-resonance optical Bloch equations of the double-Λ system (first order in the weak fields).

With ρ11 = 1 the coherences obey

    dρ31/dt = i/2 Ω_p + i/2 Ω_c ρ21 − γ31/2 ρ31
    dρ41/dt = i/2 Ω_s + i/2 Ω_d ρ21 − γ41/2 ρ41
    dρ21/dt = i/2 Ω_c* ρ31 + i/2 Ω_d* ρ41 − γ21/2 ρ21

Everything here broadcasts over numpy arrays.
"""

from __future__ import annotations

import numpy as np

from src.core.errors import SingularSystemError
from src.core.params import CoherenceState, PhysParams


def steady_coherences(
    omega_p,
    omega_s,
    omega_c,
    omega_d,
    params: PhysParams,
) -> CoherenceState:
    """Fixed point of the Bloch equations, by explicit elimination of ρ31 and ρ41.

    With both controls off and γ21 = 0 the ground coherence is undetermined;
    it is set to zero, which leaves the two decoupled two-level responses.
    """
    p, s, c, d = np.broadcast_arrays(
        np.asarray(omega_p, dtype=complex),
        np.asarray(omega_s, dtype=complex),
        np.asarray(omega_c, dtype=complex),
        np.asarray(omega_d, dtype=complex),
    )
    g31, g41, g21 = params.gamma31, params.gamma41, params.gamma21

    den = g41 * np.abs(c) ** 2 + g31 * np.abs(d) ** 2 + g31 * g41 * g21
    num = g41 * np.conj(c) * p + g31 * np.conj(d) * s
    singular = den == 0.0
    rho21 = -num / np.where(singular, 1.0, den)
    rho21 = np.where(singular, 0.0, rho21)

    rho31 = 1j * (p + c * rho21) / g31
    rho41 = 1j * (s + d * rho21) / g41

    if not (np.all(np.isfinite(rho31)) and np.all(np.isfinite(rho41)) and np.all(np.isfinite(rho21))):
        raise SingularSystemError(
            f"steady Bloch solve produced non-finite coherences "
            f"(gamma31={g31}, gamma41={g41}, gamma21={g21}, "
            f"max|omega_c|={np.max(np.abs(c)):.3g}, max|omega_d|={np.max(np.abs(d)):.3g})"
        )

    if rho31.ndim == 0:
        return CoherenceState(complex(rho31), complex(rho41), complex(rho21))
    return CoherenceState(rho31, rho41, rho21)


def bloch_generator(omega_c: complex, omega_d: complex, params: PhysParams) -> np.ndarray:
    """3x3 matrix M of dρ/dt = M ρ + (i/2)(Ω_p, Ω_s, 0) for ρ = (ρ31, ρ41, ρ21)."""
    c, d = complex(omega_c), complex(omega_d)
    return np.array(
        [
            [-0.5 * params.gamma31, 0.0, 0.5j * c],
            [0.0, -0.5 * params.gamma41, 0.5j * d],
            [0.5j * c.conjugate(), 0.5j * d.conjugate(), -0.5 * params.gamma21],
        ],
        dtype=complex,
    )
