"""Transverse averaging over probe rays for the tilted-beam geometry.

A probe ray at transverse offset x sees the same Gaussian control pair with
its crossing point moved by x / tan θ along z. Ray results are combined with
the weights exp(−2x²/w_p²)**p, p = BeamGeometry.weight_power (p = 1 is the
plain probe intensity).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from functools import partial
from typing import Mapping, Optional, Sequence

import numpy as np
import pandas as pd

from src.core.errors import ConfigError
from src.core.grid import DEFAULT_N_Z, Grids
from src.core.parallel import run_ordered
from src.core.params import PhysParams
from src.geometry.profiles import BeamGeometry, profile_gaussian_pair
from src.propagation.pulse import PulseSpec, simulate_pulse
from src.propagation.steady_state import integrate_steady

logger = logging.getLogger(__name__)

RAY_EXTENT = 2.0  # rays span ±2 probe waists
OVERRIDE_KEYS = ("omega_c_peak", "omega_d_peak", "gamma21", "alpha")


@dataclass(frozen=True, eq=False)
class RayRun:
    """What to solve along each ray: a CW run, or a pulse on a time grid."""

    kind: str = "cw"
    omega_p0: float = 0.01
    n_z: int = DEFAULT_N_Z
    check_convergence: bool = True
    pulse: Optional[PulseSpec] = None
    grids: Optional[Grids] = None

    def __post_init__(self) -> None:
        if self.kind not in ("cw", "pulse"):
            raise ConfigError(f"ray run kind must be 'cw' or 'pulse', got {self.kind!r}")
        if self.kind == "pulse" and (self.pulse is None or self.grids is None):
            raise ConfigError("a pulse ray run needs a pulse and a time grid")


@dataclass(frozen=True, eq=False)
class TransverseResult:
    T_p: float
    T_s: float
    delay_p: Optional[float]
    delay_s: Optional[float]
    rays: pd.DataFrame


def ray_offsets(
    probe_waist_um: float, n_rays: int, weight_power: float = 1.0
) -> tuple[np.ndarray, np.ndarray]:
    """Ray offsets x (µm) and normalised weights (probe intensity)**weight_power."""
    if n_rays < 1 or n_rays % 2 == 0:
        raise ConfigError(f"n_rays must be odd, got {n_rays}")
    if n_rays == 1:
        return np.zeros(1), np.ones(1)
    x = np.linspace(-RAY_EXTENT * probe_waist_um, RAY_EXTENT * probe_waist_um, n_rays)
    w = np.exp(-2.0 * weight_power * x**2 / probe_waist_um**2)
    return x, w / w.sum()


def _solve_ray(x_um: float, geom: BeamGeometry, params: PhysParams, run: RayRun) -> dict[str, float]:
    shift = geom.ray_shift(x_um)
    profile = profile_gaussian_pair(geom).shifted(shift)
    if run.kind == "cw":
        sol = integrate_steady(
            profile, params, run.omega_p0, n_z=run.n_z, check_convergence=run.check_convergence
        )
        return {"x_um": x_um, "z_shift": shift, "T_p": sol.T_p, "T_s": sol.CE}
    res = simulate_pulse(run.pulse, profile, params, run.grids, check_convergence=run.check_convergence)
    return {
        "x_um": x_um,
        "z_shift": shift,
        "T_p": res.T_p,
        "T_s": res.T_s,
        "delay_p": res.delay_p,
        "delay_s": res.delay_s,
    }


def _weighted_delay(rays: pd.DataFrame, transmission: str, delay: str) -> float:
    energy = rays["weight"] * rays[transmission]
    total = energy.sum()
    return float((energy * rays[delay]).sum() / total) if total > 0 else 0.0


def transverse_average(
    geom: BeamGeometry,
    params: PhysParams,
    run: RayRun,
    n_rays: int = 41,
    *,
    jobs: int = 1,
) -> TransverseResult:
    """Ray-weighted (T_p, T_s) over the probe cross-section.

    Any failing ray aborts the average. Pulse runs also report energy-weighted
    delays of the summed output.
    """
    x, weights = ray_offsets(geom.probe_waist_um, n_rays, geom.weight_power)
    solve = partial(_solve_ray, geom=geom, params=params, run=run)
    rays = pd.DataFrame(run_ordered(solve, x.tolist(), jobs))
    rays.insert(1, "weight", weights)

    t_p = float((rays["weight"] * rays["T_p"]).sum())
    t_s = float((rays["weight"] * rays["T_s"]).sum())
    delay_p = delay_s = None
    if run.kind == "pulse":
        delay_p = _weighted_delay(rays, "T_p", "delay_p")
        delay_s = _weighted_delay(rays, "T_s", "delay_s")
    logger.info("delta_s=%g um: %d rays, T_p=%.6g, T_s=%.6g", geom.delta_s_um, n_rays, t_p, t_s)
    return TransverseResult(T_p=t_p, T_s=t_s, delay_p=delay_p, delay_s=delay_s, rays=rays)


def _apply_point_overrides(
    geom: BeamGeometry, params: PhysParams, override: Optional[Mapping[str, float]]
) -> tuple[BeamGeometry, PhysParams]:
    if not override:
        return geom, params
    unknown = set(override) - set(OVERRIDE_KEYS)
    if unknown:
        raise ConfigError(f"unknown sweep override keys {sorted(unknown)}; expected a subset of {OVERRIDE_KEYS}")
    beam_changes = {k: float(v) for k, v in override.items() if k in ("omega_c_peak", "omega_d_peak")}
    param_changes = {k: float(v) for k, v in override.items() if k in ("gamma21", "alpha")}
    return replace(geom, **beam_changes), params.updated(**param_changes)


def _ds_point(
    point: tuple[float, Optional[Mapping[str, float]]],
    geom: BeamGeometry,
    params: PhysParams,
    run: RayRun,
    n_rays: int,
) -> TransverseResult:
    ds, override = point
    g, p = _apply_point_overrides(replace(geom, delta_s_um=float(ds)), params, override)
    return transverse_average(g, p, run, n_rays)


def sweep_ds(
    ds_values: Sequence[float],
    geom: BeamGeometry,
    params: PhysParams,
    run: RayRun,
    n_rays: int = 41,
    *,
    overrides: Optional[Sequence[Optional[Mapping[str, float]]]] = None,
    jobs: int = 1,
    return_rays: bool = False,
):
    """Transverse-averaged (T_p, T_s) per beam separation ΔS (µm).

    overrides, when given, holds one dict per ΔS value with any of
    omega_c_peak, omega_d_peak, gamma21 and alpha.
    """
    if overrides is not None and len(overrides) != len(ds_values):
        raise ConfigError("sweep overrides must list one entry per delta_s value")
    for ds in ds_values:
        if not ds >= 0:
            raise ConfigError(f"delta_s values must be non-negative, got {ds}")
    points = list(zip([float(v) for v in ds_values], overrides or [None] * len(ds_values)))
    point = partial(_ds_point, geom=geom, params=params, run=run, n_rays=n_rays)
    results = run_ordered(point, points, jobs, label="ds sweep")

    table = pd.DataFrame(
        {
            "ds_um": [ds for ds, _ in points],
            "T_p": [r.T_p for r in results],
            "T_s": [r.T_s for r in results],
        }
    )
    if run.kind == "pulse":
        table["delay_p"] = [r.delay_p for r in results]
        table["delay_s"] = [r.delay_s for r in results]
    if not return_rays:
        return table
    rays = pd.concat(
        [r.rays.assign(ds_um=ds) for (ds, _), r in zip(points, results)], ignore_index=True
    )
    return table, rays[["ds_um"] + [c for c in rays.columns if c != "ds_um"]]


def sweep_ds_bands(
    ds_values: Sequence[float],
    geom: BeamGeometry,
    params: PhysParams,
    run: RayRun,
    gamma21_values: Sequence[float],
    n_rays: int = 41,
    *,
    overrides: Optional[Sequence[Optional[Mapping[str, float]]]] = None,
    jobs: int = 1,
) -> pd.DataFrame:
    """Repeat the ΔS sweep for each ground-state dephasing rate; long format with a gamma21 column.

    A per-point gamma21 override would defeat the band, so it is dropped here.
    """
    frames = []
    for g21 in gamma21_values:
        point_overrides = None
        if overrides is not None:
            point_overrides = [
                {k: v for k, v in (o or {}).items() if k != "gamma21"} for o in overrides
            ]
        table = sweep_ds(
            ds_values, geom, params.updated(gamma21=float(g21)), run, n_rays, overrides=point_overrides, jobs=jobs
        )
        frames.append(table.assign(gamma21=float(g21)))
    out = pd.concat(frames, ignore_index=True)
    return out[["ds_um", "gamma21"] + [c for c in out.columns if c not in ("ds_um", "gamma21")]]
