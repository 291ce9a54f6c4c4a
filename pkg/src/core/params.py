"""Domain value types shared by every solver.

Units: Rabi frequencies and rates in units of Γ, z in units of the medium
length L (z ∈ [0, 1]), time in units of 1/Γ.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from functools import partial
from typing import Callable

import numpy as np

from src.core.errors import ConfigError

logger = logging.getLogger(__name__)

DEFAULT_GAMMA_UNIT_HZ = 6.0e6
DEFAULT_LENGTH_MM = 3.5

PROFILE_KINDS = ("uniform", "sincos", "gaussian-pair", "custom-tabulated")

ProfileFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class PhysParams:
    alpha: float
    gamma31: float = 1.25
    gamma41: float = 1.25
    gamma21: float = 0.0
    length_mm: float = DEFAULT_LENGTH_MM
    gamma_unit_hz: float = DEFAULT_GAMMA_UNIT_HZ

    def __post_init__(self) -> None:
        if not self.alpha > 0:
            raise ConfigError(f"alpha must be positive, got {self.alpha}")
        if not self.gamma31 > 0:
            raise ConfigError(f"gamma31 must be positive, got {self.gamma31}")
        if not self.gamma41 > 0:
            raise ConfigError(f"gamma41 must be positive, got {self.gamma41}")
        if not self.gamma21 >= 0:
            raise ConfigError(f"gamma21 must be non-negative, got {self.gamma21}")
        if not self.length_mm > 0:
            raise ConfigError(f"length_mm must be positive, got {self.length_mm}")
        if not self.gamma_unit_hz > 0:
            raise ConfigError(f"gamma_unit_hz must be positive, got {self.gamma_unit_hz}")
        if self.gamma21 > 0.1 * self.gamma31:
            logger.warning(
                "gamma21=%g exceeds 0.1*gamma31=%g; ground-state dephasing is no longer small",
                self.gamma21,
                0.1 * self.gamma31,
            )

    @property
    def gamma_unit(self) -> float:
        """Γ in rad/s."""
        return 2.0 * math.pi * self.gamma_unit_hz

    @property
    def length_um(self) -> float:
        return self.length_mm * 1.0e3

    def to_seconds(self, t: float) -> float:
        return t / self.gamma_unit

    def updated(self, **changes: float) -> PhysParams:
        return replace(self, **changes)

    def to_config(self) -> dict[str, float]:
        return {
            "alpha": self.alpha,
            "gamma31": self.gamma31,
            "gamma41": self.gamma41,
            "gamma21": self.gamma21,
            "length_mm": self.length_mm,
            "gamma_unit_hz": self.gamma_unit_hz,
        }


def _shifted(z: np.ndarray, fn: ProfileFn, dz: float) -> np.ndarray:
    return fn(np.asarray(z, dtype=float) - dz)


@dataclass(frozen=True)
class ControlProfile:
    """Pair of control Rabi-frequency functions Ω_c(z), Ω_d(z) over z ∈ [0, 1].

    The functions are module-level callables (or functools.partial of them) so
    profiles pickle cleanly into worker processes.
    """

    kind: str
    omega_c: ProfileFn
    omega_d: ProfileFn
    description: dict = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        if self.kind not in PROFILE_KINDS:
            raise ConfigError(f"unknown profile kind {self.kind!r}; expected one of {PROFILE_KINDS}")

    def evaluate(self, z: np.ndarray | float) -> tuple[np.ndarray, np.ndarray]:
        z_arr = np.asarray(z, dtype=float)
        c = np.broadcast_to(np.asarray(self.omega_c(z_arr), dtype=complex), z_arr.shape)
        d = np.broadcast_to(np.asarray(self.omega_d(z_arr), dtype=complex), z_arr.shape)
        return c, d

    def total_strength(self, z: np.ndarray | float) -> np.ndarray:
        c, d = self.evaluate(z)
        return np.sqrt(np.abs(c) ** 2 + np.abs(d) ** 2)

    def shifted(self, dz: float) -> ControlProfile:
        """Profile seen by a ray whose crossing with the control beams moves by dz (units of L)."""
        if dz == 0.0:
            return self
        return ControlProfile(
            kind=self.kind,
            omega_c=partial(_shifted, fn=self.omega_c, dz=dz),
            omega_d=partial(_shifted, fn=self.omega_d, dz=dz),
            description={**self.description, "shift": dz},
        )

    def check(self, z_grid: np.ndarray) -> None:
        c, d = self.evaluate(z_grid)
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(d))):
            raise ConfigError(f"{self.kind} profile is not finite on [0, 1]")
        total = np.abs(c) ** 2 + np.abs(d) ** 2
        if np.any(total == 0.0):
            logger.warning(
                "%s profile has zero total control strength at %d grid points; "
                "normal modes are undefined there",
                self.kind,
                int(np.count_nonzero(total == 0.0)),
            )


def _check_increasing(name: str, grid: np.ndarray) -> None:
    if grid.ndim != 1 or grid.size < 2 or np.any(np.diff(grid) <= 0):
        raise ValueError(f"{name} must be a strictly increasing 1-D grid")


@dataclass(frozen=True, eq=False)
class FieldState:
    """Probe/signal envelopes on the z grid (and optionally a time axis).

    Steady records are 1-D over z. Time records carry arrays whose last axis
    runs over t_grid.
    """

    z_grid: np.ndarray
    omega_p: np.ndarray
    omega_s: np.ndarray
    t_grid: np.ndarray | None = None

    def __post_init__(self) -> None:
        _check_increasing("z_grid", self.z_grid)
        if self.t_grid is not None:
            _check_increasing("t_grid", self.t_grid)
        for name, arr in (("omega_p", self.omega_p), ("omega_s", self.omega_s)):
            if self.t_grid is None:
                if arr.shape != self.z_grid.shape:
                    raise ValueError(f"{name} shape {arr.shape} does not match z_grid {self.z_grid.shape}")
            elif arr.shape[-1] != self.t_grid.size:
                raise ValueError(f"{name} last axis {arr.shape[-1]} does not match t_grid {self.t_grid.size}")

    def intensities(self) -> tuple[np.ndarray, np.ndarray]:
        return np.abs(self.omega_p) ** 2, np.abs(self.omega_s) ** 2


@dataclass(frozen=True, eq=False)
class CoherenceState:
    """Slowly varying coherences ρ31, ρ41, ρ21 (scalars or arrays of equal shape)."""

    rho31: complex | np.ndarray
    rho41: complex | np.ndarray
    rho21: complex | np.ndarray

    @property
    def max_magnitude(self) -> float:
        return float(
            max(np.max(np.abs(self.rho31)), np.max(np.abs(self.rho41)), np.max(np.abs(self.rho21)))
        )

    def as_tuple(self) -> tuple:
        return self.rho31, self.rho41, self.rho21
