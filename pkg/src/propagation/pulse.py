"""Time-dependent propagation of a weak probe pulse.

In the co-moving frame (the 1/c term dropped) the fields obey

    ∂Ω_p/∂z = i (α γ31 / 2) ρ31(z, t),   ∂Ω_s/∂z = i (α γ41 / 2) ρ41(z, t)

and ρ(z, ·) follows the Bloch equations driven by Ω_p(z, ·), Ω_s(z, ·).
The z axis is marched with classical RK4. Every z stage needs the full
time response of the Bloch equations at the local control fields; that is
itself classical RK4 in t with the field traces interpolated linearly
between samples, which collapses to the affine recurrence

    ρ_{n+1} = P ρ_n + G0 S_n + G1 S_{n+1},   S = (i/2)(Ω_p, Ω_s, 0)

and is evaluated with an IIR filter over the whole trace at once.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.signal import lfilter

from src.bloch.coherences import bloch_generator
from src.core.errors import ConfigError, ConvergenceError, ResolutionError
from src.core.grid import Grids
from src.core.params import ControlProfile, PhysParams
from src.propagation.metrics import PulseMetrics, trace_metrics
from src.quality.checks import (
    PASSIVE_TOL_PULSE,
    RunChecks,
    check_passive,
    check_pulse_resolution,
    check_weak_probe,
)

logger = logging.getLogger(__name__)

PULSE_SHAPES = ("gaussian", "custom-tabulated")
PULSE_REFINEMENT_TOL = 1e-4
STRONG_PULSE_FRACTION = 0.1
_FOUR_LN2 = 4.0 * np.log(2.0)


@dataclass(frozen=True)
class PulseSpec:
    """Input probe envelope Ω_p(0, t).

    A gaussian has amplitude peak·exp(−2 ln2 (t − t0)²/fwhm²), so fwhm is the
    intensity FWHM. A tabulated pulse is linear interpolation of (times,
    values), zero outside the table; fwhm then only sets the resolution check.
    """

    shape: str = "gaussian"
    peak: float = 0.01
    fwhm: float = 75.4
    t0: Optional[float] = None
    times: Optional[tuple[float, ...]] = None
    values: Optional[tuple[float, ...]] = None

    def __post_init__(self) -> None:
        if self.shape not in PULSE_SHAPES:
            raise ConfigError(f"unknown pulse shape {self.shape!r}; expected one of {PULSE_SHAPES}")
        if not self.fwhm > 0:
            raise ConfigError(f"pulse fwhm must be positive, got {self.fwhm}")
        if self.shape == "custom-tabulated":
            if not self.times or not self.values or len(self.times) != len(self.values):
                raise ConfigError("a tabulated pulse needs equal-length times and values")
            if np.any(np.diff(self.times) <= 0):
                raise ConfigError("tabulated pulse times must be strictly increasing")

    @property
    def center(self) -> float:
        return 2.0 * self.fwhm if self.t0 is None else self.t0

    @property
    def peak_amplitude(self) -> float:
        if self.shape == "gaussian":
            return abs(self.peak)
        return float(np.max(np.abs(self.values)))

    def trace(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.shape == "gaussian":
            envelope = np.exp(-0.5 * _FOUR_LN2 * (t - self.center) ** 2 / self.fwhm**2)
            return (self.peak * envelope).astype(complex)
        return np.interp(t, self.times, self.values, left=0.0, right=0.0).astype(complex)

    @classmethod
    def from_model(cls, model) -> PulseSpec:
        return cls(
            shape=model.shape,
            peak=model.peak,
            fwhm=model.fwhm,
            t0=model.t0,
            times=None if model.times is None else tuple(model.times),
            values=None if model.values is None else tuple(model.values),
        )


@dataclass(frozen=True, eq=False)
class PulseResult:
    t_grid: np.ndarray
    z_grid: np.ndarray
    input_probe: np.ndarray
    output_probe: np.ndarray
    output_signal: np.ndarray
    metrics: PulseMetrics
    energy_p_z: np.ndarray
    energy_s_z: np.ndarray
    gamma_unit: float
    checks: RunChecks = field(default_factory=RunChecks)

    @property
    def T_p(self) -> float:
        return self.metrics.T_p

    @property
    def T_s(self) -> float:
        return self.metrics.T_s

    @property
    def delay_p(self) -> float:
        return self.metrics.delay_p

    @property
    def delay_s(self) -> float:
        return self.metrics.delay_s

    @property
    def delay_p_seconds(self) -> float:
        return self.metrics.delay_p / self.gamma_unit

    @property
    def delay_s_seconds(self) -> float:
        return self.metrics.delay_s / self.gamma_unit

    def summary(self) -> dict[str, float]:
        return {
            "T_p": self.T_p,
            "T_s": self.T_s,
            "delay_p": self.delay_p,
            "delay_s": self.delay_s,
            "delay_p_us": self.delay_p_seconds * 1e6,
            "delay_s_us": self.delay_s_seconds * 1e6,
        }


def _rk4_step(m: np.ndarray, h: float, rho: np.ndarray, s0: np.ndarray, s1: np.ndarray) -> np.ndarray:
    sm = 0.5 * (s0 + s1)
    k1 = m @ rho + s0
    k2 = m @ (rho + 0.5 * h * k1) + sm
    k3 = m @ (rho + 0.5 * h * k2) + sm
    k4 = m @ (rho + h * k3) + s1
    return rho + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


@dataclass(frozen=True, eq=False)
class _BlochFilter:
    """Time response of the Bloch equations at fixed control fields."""

    g0: np.ndarray
    g1: np.ndarray
    denominator: np.ndarray
    b1: np.ndarray
    b2: np.ndarray

    @classmethod
    def build(cls, m: np.ndarray, h: float) -> _BlochFilter:
        eye, zero = np.eye(3, dtype=complex), np.zeros((3, 3), dtype=complex)
        # the RK4 step is linear in (ρ_n, S_n, S_{n+1}); push identity blocks through it
        p = _rk4_step(m, h, eye, zero, zero)
        g0 = _rk4_step(m, h, zero, eye, zero)
        g1 = _rk4_step(m, h, zero, zero, eye)
        radius = float(np.max(np.abs(np.linalg.eigvals(p))))
        if radius > 1.0 + 1e-12:
            raise ResolutionError(f"time step dt={h:g} is outside the RK4 stability region (growth factor {radius:.6g})")
        # det(λI − P) = λ³ + c1 λ² + c2 λ + c3 and its adjugate λ² I + B1 λ + B2
        tr = np.trace(p)
        c1 = -tr
        c2 = 0.5 * (tr**2 - np.trace(p @ p))
        c3 = -np.linalg.det(p)
        b1 = p + c1 * eye
        b2 = p @ b1 + c2 * eye
        return cls(g0=g0[:, :2], g1=g1[:, :2], denominator=np.array([1.0, c1, c2, c3]), b1=b1, b2=b2)

    def response(self, omega_p: np.ndarray, omega_s: np.ndarray) -> np.ndarray:
        """ρ(t) on the time grid, shape (3, n_t), starting from ρ = 0."""
        source = 0.5j * np.vstack([omega_p, omega_s])
        drive = np.zeros((3, source.shape[1]), dtype=complex)
        drive[:, 1:] = self.g0 @ source[:, :-1] + self.g1 @ source[:, 1:]
        w = lfilter([1.0], self.denominator, drive, axis=1)
        rho = w.copy()
        rho[:, 1:] += self.b1 @ w[:, :-1]
        rho[:, 2:] += self.b2 @ w[:, :-2]
        return rho


def _march_pulse(
    profile: ControlProfile,
    params: PhysParams,
    z: np.ndarray,
    t: np.ndarray,
    probe_in: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, float]:
    n_z = z.size
    h = float(z[1] - z[0])
    dt = float(t[1] - t[0])
    z_half = np.linspace(z[0], z[-1], 2 * n_z - 1)
    c, d = profile.evaluate(z_half)
    filters = [_BlochFilter.build(bloch_generator(ci, di, params), dt) for ci, di in zip(c, d)]
    k31 = 0.5j * params.alpha * params.gamma31
    k41 = 0.5j * params.alpha * params.gamma41

    max_rho = 0.0

    def slope(j: int, p: np.ndarray, s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        nonlocal max_rho
        rho = filters[j].response(p, s)
        max_rho = max(max_rho, float(np.abs(rho).max()))
        return k31 * rho[0], k41 * rho[1]

    p = probe_in.astype(complex)
    s = np.zeros_like(p)
    energy_p = np.empty(n_z)
    energy_s = np.empty(n_z)
    energy_p[0] = np.trapezoid(np.abs(p) ** 2, t)
    energy_s[0] = 0.0
    for k in range(n_z - 1):
        j0, jm, j1 = 2 * k, 2 * k + 1, 2 * k + 2
        k1p, k1s = slope(j0, p, s)
        k2p, k2s = slope(jm, p + 0.5 * h * k1p, s + 0.5 * h * k1s)
        k3p, k3s = slope(jm, p + 0.5 * h * k2p, s + 0.5 * h * k2s)
        k4p, k4s = slope(j1, p + h * k3p, s + h * k3s)
        p = p + h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        s = s + h / 6.0 * (k1s + 2.0 * k2s + 2.0 * k3s + k4s)
        energy_p[k + 1] = np.trapezoid(np.abs(p) ** 2, t)
        energy_s[k + 1] = np.trapezoid(np.abs(s) ** 2, t)
    return p, s, energy_p, energy_s, max_rho


def simulate_pulse(
    pulse: PulseSpec,
    profile: ControlProfile,
    params: PhysParams,
    grids: Grids,
    *,
    check_convergence: bool = True,
) -> PulseResult:
    """Propagate Ω_p(0, t) through the medium; the signal starts from zero at z = 0."""
    if grids.t is None:
        raise ConfigError("pulse simulation needs a time grid (set grid.n_t and grid.t_span)")
    z, t = grids.z, grids.t
    checks = RunChecks()

    check_pulse_resolution(pulse.fwhm, grids.dt, z.size)
    checks.resolution = True
    profile.check(z)

    strongest_control = float(profile.total_strength(z).max())
    if pulse.peak_amplitude > STRONG_PULSE_FRACTION * strongest_control:
        logger.warning(
            "pulse peak %.3g is not small against the control fields (max %.3g); first-order model may not hold",
            pulse.peak_amplitude,
            strongest_control,
        )

    probe_in = pulse.trace(t)
    p_out, s_out, energy_p, energy_s, max_rho = _march_pulse(profile, params, z, t, probe_in)
    metrics = trace_metrics(t, probe_in, p_out, s_out)

    context = f"alpha={params.alpha}, profile={profile.kind}, peak={pulse.peak_amplitude:g}"
    checks.max_coherence = max_rho
    check_weak_probe(max_rho, context=context)
    checks.weak_probe = True

    if check_convergence:
        coarse_z = np.linspace(z[0], z[-1], (z.size + 1) // 2)
        coarse_t = np.linspace(t[0], t[-1], (t.size + 1) // 2)
        coarse_in = pulse.trace(coarse_t)
        cp, cs, _, _, _ = _march_pulse(profile, params, coarse_z, coarse_t, coarse_in)
        coarse = trace_metrics(coarse_t, coarse_in, cp, cs)
        # absolute gap in units of the input energy
        delta = max(abs(metrics.T_p - coarse.T_p), abs(metrics.T_s - coarse.T_s))
        checks.refinement_delta = delta
        if not delta < PULSE_REFINEMENT_TOL:
            raise ConvergenceError(
                f"pulse solution not converged: doubling dz and dt changes T_p/T_s by {delta:.3g} "
                f"of the input energy ({context}, n_z={z.size}, n_t={t.size})"
            )
        checks.converged = True

    check_passive(metrics.T_p, metrics.T_s, PASSIVE_TOL_PULSE, context)
    checks.passive = True

    return PulseResult(
        t_grid=t,
        z_grid=z,
        input_probe=probe_in,
        output_probe=p_out,
        output_signal=s_out,
        metrics=metrics,
        energy_p_z=energy_p,
        energy_s_z=energy_s,
        gamma_unit=params.gamma_unit,
        checks=checks,
    )
