"""Hard quality gates applied to every simulation result.

A gate that fails raises; the RunChecks record keeps what was verified so the
CLI can put it in the run summary.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional

from src.core.errors import PerturbativeRegimeError, QualityGateError, ResolutionError

PASSIVE_TOL_CW = 1e-9
PASSIVE_TOL_PULSE = 1e-6
WEAK_PROBE_LIMIT = 0.5
MIN_POINTS_PER_FWHM = 40
MIN_Z_POINTS_PULSE = 500


@dataclass
class RunChecks:
    passive: bool = False
    weak_probe: bool = False
    resolution: bool = False
    converged: Optional[bool] = None  # None: refinement check not run
    max_coherence: float = 0.0
    refinement_delta: Optional[float] = None

    def to_dict(self) -> dict:
        return asdict(self)


def check_passive(t_p: float, t_s: float, tol: float, context: str = "") -> None:
    if not (t_p >= 0 and t_s >= 0):
        raise QualityGateError(f"Quality gate failed: negative transmission T_p={t_p:.6g} T_s={t_s:.6g}. {context}")
    total = t_p + t_s
    if not total <= 1.0 + tol:
        raise QualityGateError(
            f"Quality gate failed: passive medium gains energy, T_p + T_s = {total:.12g} > 1 + {tol:g}. {context}"
        )


def check_weak_probe(max_coherence: float, limit: float = WEAK_PROBE_LIMIT, context: str = "") -> None:
    if not max_coherence <= limit:
        raise PerturbativeRegimeError(
            f"max |rho| = {max_coherence:.3g} exceeds {limit:g}; probe too strong for the "
            f"first-order model. {context}"
        )


def check_pulse_resolution(fwhm: float, dt: float, n_z: int) -> None:
    points = fwhm / dt
    if points < MIN_POINTS_PER_FWHM:
        raise ResolutionError(
            f"time grid resolves the pulse with {points:.1f} points per FWHM (< {MIN_POINTS_PER_FWHM}); "
            f"fwhm={fwhm:g}, dt={dt:g}"
        )
    if n_z < MIN_Z_POINTS_PULSE:
        raise ResolutionError(f"n_z={n_z} < {MIN_Z_POINTS_PULSE} z points required for pulse runs")
