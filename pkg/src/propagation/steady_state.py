"""CW propagation of probe and signal through the double-Λ medium.

With ∂/∂t = 0 and z in units of L the field equations read

    dΩ_p/dz = i (α γ31 / 2) ρ31,   dΩ_s/dz = i (α γ41 / 2) ρ41

and the steady coherences are linear in (Ω_p, Ω_s), so the right-hand side is
a 2x2 matrix A(z) applied to the field pair. It is integrated with classical
RK4 on the fixed z grid.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import partial
from typing import Sequence

import numpy as np
import pandas as pd

from src.bloch.coherences import steady_coherences
from src.bloch.normal_modes import NormalModes, to_normal_modes
from src.core.errors import ConvergenceError
from src.core.grid import DEFAULT_N_Z, build_grid
from src.core.parallel import run_ordered
from src.core.params import ControlProfile, FieldState, PhysParams
from src.quality.checks import PASSIVE_TOL_CW, RunChecks, check_passive

logger = logging.getLogger(__name__)

REFINEMENT_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class SteadySolution:
    fields: FieldState
    probe_transmission: float
    conversion_efficiency: float
    checks: RunChecks

    @property
    def T_p(self) -> float:
        return self.probe_transmission

    @property
    def CE(self) -> float:
        return self.conversion_efficiency

    def normal_modes(self, profile: ControlProfile) -> NormalModes:
        c, d = profile.evaluate(self.fields.z_grid)
        return to_normal_modes(self.fields.omega_p, self.fields.omega_s, c, d)


def field_matrix(omega_c: np.ndarray, omega_d: np.ndarray, params: PhysParams) -> np.ndarray:
    """A(z) with d(Ω_p, Ω_s)/dz = A (Ω_p, Ω_s); shape (..., 2, 2)."""
    unit_p = steady_coherences(1.0, 0.0, omega_c, omega_d, params)
    unit_s = steady_coherences(0.0, 1.0, omega_c, omega_d, params)
    k31 = 0.5j * params.alpha * params.gamma31
    k41 = 0.5j * params.alpha * params.gamma41
    a = np.empty(np.shape(omega_c) + (2, 2), dtype=complex)
    a[..., 0, 0] = k31 * unit_p.rho31
    a[..., 0, 1] = k31 * unit_s.rho31
    a[..., 1, 0] = k41 * unit_p.rho41
    a[..., 1, 1] = k41 * unit_s.rho41
    return a


def _march(
    profile: ControlProfile,
    params: PhysParams,
    n_z: int,
    omega_p0: complex,
    omega_s0: complex,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    z = build_grid(n_z).z
    h = 1.0 / (n_z - 1)
    # nodes sit at even indices of the half-step grid, midpoints at odd ones
    z_half = np.linspace(0.0, 1.0, 2 * n_z - 1)
    c, d = profile.evaluate(z_half)
    a = field_matrix(c, d, params)
    a11, a12 = a[:, 0, 0].tolist(), a[:, 0, 1].tolist()
    a21, a22 = a[:, 1, 0].tolist(), a[:, 1, 1].tolist()

    p_out = [0j] * n_z
    s_out = [0j] * n_z
    p, s = complex(omega_p0), complex(omega_s0)
    p_out[0], s_out[0] = p, s
    half = 0.5 * h
    for k in range(n_z - 1):
        j0, jm, j1 = 2 * k, 2 * k + 1, 2 * k + 2
        k1p = a11[j0] * p + a12[j0] * s
        k1s = a21[j0] * p + a22[j0] * s
        pp, ss = p + half * k1p, s + half * k1s
        k2p = a11[jm] * pp + a12[jm] * ss
        k2s = a21[jm] * pp + a22[jm] * ss
        pp, ss = p + half * k2p, s + half * k2s
        k3p = a11[jm] * pp + a12[jm] * ss
        k3s = a21[jm] * pp + a22[jm] * ss
        pp, ss = p + h * k3p, s + h * k3s
        k4p = a11[j1] * pp + a12[j1] * ss
        k4s = a21[j1] * pp + a22[j1] * ss
        p = p + h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        s = s + h / 6.0 * (k1s + 2.0 * k2s + 2.0 * k3s + k4s)
        p_out[k + 1], s_out[k + 1] = p, s

    return z, np.array(p_out, dtype=complex), np.array(s_out, dtype=complex)


def integrate_steady(
    profile: ControlProfile,
    params: PhysParams,
    omega_p0: complex = 0.01,
    *,
    omega_s0: complex = 0.0,
    n_z: int = DEFAULT_N_Z,
    check_convergence: bool = True,
) -> SteadySolution:
    """Steady probe/signal fields along the medium.

    Transmissions are normalised to the total input intensity, which is
    |Ω_p0|² for the usual probe-only injection.
    """
    input_intensity = abs(omega_p0) ** 2 + abs(omega_s0) ** 2
    if input_intensity == 0.0:
        raise ValueError("integrate_steady needs a non-zero input field")

    grids = build_grid(n_z)
    profile.check(grids.z)
    z, p, s = _march(profile, params, n_z, omega_p0, omega_s0)
    t_p = float(abs(p[-1]) ** 2 / input_intensity)
    ce = float(abs(s[-1]) ** 2 / input_intensity)

    checks = RunChecks()
    if check_convergence:
        _, p_fine, s_fine = _march(profile, params, 2 * n_z - 1, omega_p0, omega_s0)
        delta = max(
            abs(abs(p_fine[-1]) ** 2 / input_intensity - t_p),
            abs(abs(s_fine[-1]) ** 2 / input_intensity - ce),
        )
        checks.refinement_delta = float(delta)
        if not delta < REFINEMENT_TOL:
            raise ConvergenceError(
                f"steady solution not converged: halving dz changes T_p/CE by {delta:.3g} "
                f"(alpha={params.alpha}, profile={profile.kind}, n_z={n_z})"
            )
        checks.converged = True

    context = f"alpha={params.alpha}, profile={profile.kind}"
    check_passive(t_p, ce, PASSIVE_TOL_CW, context)
    checks.passive = True

    c, d = profile.evaluate(z)
    rho = steady_coherences(p, s, c, d, params)
    checks.max_coherence = rho.max_magnitude
    checks.weak_probe = checks.max_coherence <= 1.0
    if not checks.weak_probe:
        logger.warning("steady coherences reach %.3g (> 1); omega_p0=%g is not a weak probe", checks.max_coherence, abs(omega_p0))
    checks.resolution = True

    return SteadySolution(
        fields=FieldState(z_grid=z, omega_p=p, omega_s=s),
        probe_transmission=t_p,
        conversion_efficiency=ce,
        checks=checks,
    )


def _od_point(
    alpha: float,
    profile: ControlProfile,
    params: PhysParams,
    omega_p0: float,
    n_z: int,
    check_convergence: bool,
) -> dict[str, float]:
    sol = integrate_steady(
        profile,
        params.updated(alpha=alpha),
        omega_p0,
        n_z=n_z,
        check_convergence=check_convergence,
    )
    return {"alpha": alpha, "T_p": sol.T_p, "CE": sol.CE, "converged": sol.checks.converged}


def sweep_od(
    alphas: Sequence[float],
    profile: ControlProfile,
    params: PhysParams,
    omega_p0: float = 0.01,
    *,
    n_z: int = DEFAULT_N_Z,
    check_convergence: bool = True,
    jobs: int = 1,
) -> pd.DataFrame:
    """One steady run per optical density; rows keep the input order."""
    for alpha in alphas:
        if not alpha > 0:
            raise ValueError(f"every alpha in an OD sweep must be positive, got {alpha}")
    point = partial(
        _od_point,
        profile=profile,
        params=params,
        omega_p0=omega_p0,
        n_z=n_z,
        check_convergence=check_convergence,
    )
    rows = run_ordered(point, [float(a) for a in alphas], jobs, label="od sweep")
    return pd.DataFrame(rows, columns=["alpha", "T_p", "CE", "converged"])
