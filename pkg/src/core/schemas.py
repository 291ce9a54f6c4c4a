"""pydantic models for the JSON run configuration."""

from __future__ import annotations

import math
from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class _Spec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class UniformProfileSpec(_Spec):
    kind: Literal["uniform"]
    omega_c: float
    omega_d: float = 0.0


class SinCosProfileSpec(_Spec):
    kind: Literal["sincos"]
    omega_0: float

    @field_validator("omega_0")
    @classmethod
    def _positive(cls, v: float) -> float:
        if not v > 0:
            raise ValueError("omega_0 must be positive")
        return v


class GaussianPairProfileSpec(_Spec):
    kind: Literal["gaussian-pair"]
    omega_c: float
    omega_d: float
    angle_deg: float = 2.0
    control_waist_um: float = 124.0
    probe_waist_um: float = 141.0
    delta_s_um: float = 0.0
    n_rays: int = 41
    separation_scale: float = 1.4
    weight_power: float = 2.5

    @field_validator("angle_deg")
    @classmethod
    def _angle(cls, v: float) -> float:
        if not 0.0 < v < 90.0:
            raise ValueError("angle_deg must lie strictly between 0 and 90")
        return v

    @field_validator("control_waist_um", "probe_waist_um")
    @classmethod
    def _waist(cls, v: float) -> float:
        if not v > 0:
            raise ValueError("beam waists must be positive")
        return v

    @field_validator("delta_s_um")
    @classmethod
    def _separation(cls, v: float) -> float:
        if not v >= 0:
            raise ValueError("delta_s_um must be non-negative")
        return v

    @field_validator("separation_scale", "weight_power")
    @classmethod
    def _calibration(cls, v: float) -> float:
        if not v > 0:
            raise ValueError("separation_scale and weight_power must be positive")
        return v

    @field_validator("n_rays")
    @classmethod
    def _rays(cls, v: int) -> int:
        if v < 1 or v % 2 == 0:
            raise ValueError("n_rays must be odd (1 runs the on-axis ray only)")
        return v


class TabulatedProfileSpec(_Spec):
    kind: Literal["custom-tabulated"]
    z: list[float]
    omega_c: list[float]
    omega_d: list[float]

    @model_validator(mode="after")
    def _table(self) -> TabulatedProfileSpec:
        if len(self.z) < 2:
            raise ValueError("a tabulated profile needs at least two z points")
        if not (len(self.z) == len(self.omega_c) == len(self.omega_d)):
            raise ValueError("z, omega_c and omega_d tables must have equal lengths")
        if any(b <= a for a, b in zip(self.z, self.z[1:])):
            raise ValueError("tabulated z must be strictly increasing")
        return self


ProfileSpec = Annotated[
    Union[UniformProfileSpec, SinCosProfileSpec, GaussianPairProfileSpec, TabulatedProfileSpec],
    Field(discriminator="kind"),
]


class GridSpec(_Spec):
    n_z: int = 2001
    n_t: Optional[int] = None
    t_span: Optional[float] = None
    check_convergence: bool = True

    @field_validator("n_z")
    @classmethod
    def _n_z(cls, v: int) -> int:
        if v < 2:
            raise ValueError("n_z must be at least 2")
        return v

    @field_validator("t_span")
    @classmethod
    def _t_span(cls, v: Optional[float]) -> Optional[float]:
        if v is not None and not v > 0:
            raise ValueError("t_span must be positive")
        return v


class PulseSpecModel(_Spec):
    shape: Literal["gaussian", "custom-tabulated"] = "gaussian"
    peak: float = 0.01
    fwhm: float = 75.4
    t0: Optional[float] = None
    times: Optional[list[float]] = None
    values: Optional[list[float]] = None

    @field_validator("fwhm")
    @classmethod
    def _fwhm(cls, v: float) -> float:
        if not v > 0:
            raise ValueError("pulse fwhm must be positive")
        return v

    @model_validator(mode="after")
    def _table(self) -> PulseSpecModel:
        if self.shape == "custom-tabulated":
            if not self.times or not self.values or len(self.times) != len(self.values):
                raise ValueError("a tabulated pulse needs equal-length times and values")
        return self


class SweepSpec(_Spec):
    axis: Optional[Literal["od", "ds"]] = None
    values: list[float] = Field(default_factory=list)
    run: Literal["cw", "pulse"] = "cw"
    overrides: Optional[list[dict[str, float]]] = None
    gamma21_bands: list[float] = Field(default_factory=list)

    @model_validator(mode="after")
    def _overrides(self) -> SweepSpec:
        if self.overrides is not None and len(self.overrides) != len(self.values):
            raise ValueError("sweep overrides must list one entry per sweep value")
        return self


FIT_PARAMETERS = ("omega_d_peak", "omega_c_peak", "gamma21", "alpha")


class FitSpec(_Spec):
    free: dict[str, tuple[float, float]]
    data: Optional[str] = None
    start: dict[str, float] = Field(default_factory=dict)
    tolerance: float = 1e-6
    max_evaluations: int = 500
    initial_simplex_scale: float = 0.1
    starts: list[dict[str, float]] = Field(default_factory=list)

    @model_validator(mode="after")
    def _bounds(self) -> FitSpec:
        if not self.free:
            raise ValueError("a fit needs at least one free parameter")
        for name, (lo, hi) in self.free.items():
            if name not in FIT_PARAMETERS:
                raise ValueError(f"unknown fit parameter {name!r}; expected one of {FIT_PARAMETERS}")
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise ValueError(f"bounds for {name} must be finite with lower < upper")
        return self


class RunConfig(_Spec):
    alpha: float
    gamma31: float = 1.25
    gamma41: float = 1.25
    gamma21: float = 0.0
    gamma_unit_hz: float = 6.0e6
    length_mm: float = 3.5
    omega_p0: float = 0.01
    profile: Optional[ProfileSpec] = None
    grid: GridSpec = Field(default_factory=GridSpec)
    pulse: Optional[PulseSpecModel] = None
    sweep: Optional[SweepSpec] = None
    fit: Optional[FitSpec] = None

    @field_validator("alpha")
    @classmethod
    def _alpha(cls, v: float) -> float:
        if not v > 0:
            raise ValueError("alpha must be positive")
        return v

    @field_validator("gamma31", "gamma41")
    @classmethod
    def _decay(cls, v: float) -> float:
        if not v > 0:
            raise ValueError("excited-state decay rates must be positive")
        return v

    @field_validator("gamma21")
    @classmethod
    def _dephasing(cls, v: float) -> float:
        if not v >= 0:
            raise ValueError("gamma21 must be non-negative")
        return v

    @field_validator("omega_p0")
    @classmethod
    def _probe(cls, v: float) -> float:
        if not v > 0:
            raise ValueError("omega_p0 must be positive")
        return v
