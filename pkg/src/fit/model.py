"""Forward models mapping trial parameter values to predicted transmissions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping

import numpy as np
import pandas as pd

from src.core.errors import ConfigError
from src.core.grid import DEFAULT_N_Z
from src.core.params import PhysParams
from src.core.schemas import GaussianPairProfileSpec, SinCosProfileSpec
from src.geometry.beams import RayRun, transverse_average
from src.geometry.profiles import build_profile, geometry_from_spec
from src.propagation.steady_state import integrate_steady

PROFILE_FIELDS = {"omega_c_peak": "omega_c", "omega_d_peak": "omega_d"}
PARAM_FIELDS = ("gamma21", "alpha")


@dataclass(frozen=True, eq=False)
class SteadyTransmissionModel:
    """CW (T_p, T_s) for every row of a data table.

    Rows are indexed by an ``alpha`` column (OD scan) or a ``ds_um`` column
    (beam-separation scan, transverse averaged); a table with neither is a
    single operating point.
    """

    params: PhysParams
    profile: Any  # validated profile descriptor from src.core.schemas
    omega_p0: float = 0.01
    n_z: int = DEFAULT_N_Z
    check_convergence: bool = False

    def _resolve(self, values: Mapping[str, float]) -> tuple[PhysParams, Any]:
        profile_update: dict[str, float] = {}
        for name, field_name in PROFILE_FIELDS.items():
            if name not in values:
                continue
            if isinstance(self.profile, SinCosProfileSpec):
                if name == "omega_d_peak":
                    raise ConfigError("the sincos profile has a single amplitude; fit omega_c_peak instead")
                field_name = "omega_0"
            elif not hasattr(self.profile, field_name):
                raise ConfigError(f"{name} cannot be fitted for a {self.profile.kind} profile")
            profile_update[field_name] = float(values[name])
        params = self.params.updated(**{k: float(values[k]) for k in PARAM_FIELDS if k in values})
        return params, self.profile.model_copy(update=profile_update)

    def _point(self, params: PhysParams, spec: Any) -> tuple[float, float]:
        if isinstance(spec, GaussianPairProfileSpec):
            run = RayRun(kind="cw", omega_p0=self.omega_p0, n_z=self.n_z, check_convergence=self.check_convergence)
            res = transverse_average(geometry_from_spec(spec, params), params, run, spec.n_rays)
            return res.T_p, res.T_s
        sol = integrate_steady(
            build_profile(spec, params), params, self.omega_p0, n_z=self.n_z, check_convergence=self.check_convergence
        )
        return sol.T_p, sol.CE

    def __call__(self, values: Mapping[str, float], data: pd.DataFrame) -> np.ndarray:
        """Predicted transmissions, shape (len(data), 2) with columns (T_p, T_s)."""
        params, spec = self._resolve(values)
        if "alpha" in data.columns:
            rows = [self._point(params.updated(alpha=float(a)), spec) for a in data["alpha"]]
        elif "ds_um" in data.columns:
            if not isinstance(spec, GaussianPairProfileSpec):
                raise ConfigError("a ds_um data table needs a gaussian-pair profile")
            rows = [self._point(params, spec.model_copy(update={"delta_s_um": float(ds)})) for ds in data["ds_um"]]
        else:
            rows = [self._point(params, spec)] * len(data)
        return np.asarray(rows, dtype=float).reshape(len(data), 2)
