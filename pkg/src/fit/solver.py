"""Bounded least-squares parameter fits with the Nelder-Mead simplex.

Free parameters are mapped to [0, 1] by their bounds before the search, so
rates of very different magnitude (Ω_d ~ 0.4, γ21 ~ 1e-3) share one simplex
scale. Convergence means the simplex diameter fell below the tolerance in
those scaled coordinates.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from functools import partial
from typing import Callable, Mapping, Optional, Sequence

import numpy as np
import pandas as pd
from scipy.optimize import minimize

from src.core.errors import ConfigError
from src.core.parallel import run_ordered
from src.core.schemas import FIT_PARAMETERS

logger = logging.getLogger(__name__)

OBSERVABLES = ("T_p", "T_s")

ForwardModel = Callable[[Mapping[str, float], pd.DataFrame], np.ndarray]


@dataclass(frozen=True)
class FitSettings:
    tolerance: float = 1e-6
    max_evaluations: int = 500
    initial_simplex_scale: float = 0.1

    def __post_init__(self) -> None:
        if not self.tolerance > 0:
            raise ConfigError(f"fit tolerance must be positive, got {self.tolerance}")
        if self.max_evaluations < 1:
            raise ConfigError(f"max_evaluations must be at least 1, got {self.max_evaluations}")
        if not 0 < self.initial_simplex_scale <= 0.5:
            raise ConfigError("initial_simplex_scale must lie in (0, 0.5]")


@dataclass(frozen=True, eq=False)
class FitProblem:
    """Observed transmissions plus the free parameters to adjust.

    data holds T_p and/or T_s columns and whatever index column the model
    reads (alpha, ds_um). Parameters not listed in free keep the model's
    own values.
    """

    data: pd.DataFrame
    model: ForwardModel
    free: Mapping[str, tuple[float, float]]
    start: Mapping[str, float] = field(default_factory=dict)
    settings: FitSettings = field(default_factory=FitSettings)

    def __post_init__(self) -> None:
        if not self.free:
            raise ConfigError("a fit needs at least one free parameter")
        for name, (lo, hi) in self.free.items():
            if name not in FIT_PARAMETERS:
                raise ConfigError(f"unknown fit parameter {name!r}; expected one of {FIT_PARAMETERS}")
            if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
                raise ConfigError(f"bounds for {name} must be finite with lower < upper, got ({lo}, {hi})")
        unknown = set(self.start) - set(self.free)
        if unknown:
            raise ConfigError(f"start values given for parameters that are not free: {sorted(unknown)}")
        if not any(col in self.data.columns for col in OBSERVABLES):
            raise ConfigError(f"fit data needs at least one of the columns {OBSERVABLES}")
        if self.data.empty:
            raise ConfigError("fit data table is empty")

    @property
    def names(self) -> list[str]:
        return list(self.free)

    def observed(self) -> tuple[list[int], np.ndarray]:
        cols = [i for i, name in enumerate(OBSERVABLES) if name in self.data.columns]
        return cols, self.data[[OBSERVABLES[i] for i in cols]].to_numpy(dtype=float)

    def to_physical(self, u: np.ndarray) -> dict[str, float]:
        out = {}
        for name, ui in zip(self.names, u):
            lo, hi = self.free[name]
            out[name] = float(lo + (hi - lo) * ui)
        return out

    def to_scaled(self, values: Mapping[str, float]) -> np.ndarray:
        u = []
        for name in self.names:
            lo, hi = self.free[name]
            u.append((values[name] - lo) / (hi - lo))
        return np.asarray(u, dtype=float)

    def initial_values(self) -> dict[str, float]:
        return {
            name: float(self.start.get(name, 0.5 * (lo + hi))) for name, (lo, hi) in self.free.items()
        }

    def loss(self, values: Mapping[str, float]) -> float:
        """Sum of squared residuals over the observed transmission columns."""
        cols, observed = self.observed()
        predicted = self.model(values, self.data)[:, cols]
        return float(np.sum((predicted - observed) ** 2))


@dataclass
class FitResult:
    values: dict[str, float]
    loss: float
    evaluations: int
    converged: bool
    initial_values: dict[str, float]
    initial_loss: float
    loss_trace: list[float]
    message: str = ""

    def to_dict(self) -> dict:
        return asdict(self)


def _initial_simplex(u0: np.ndarray, scale: float) -> np.ndarray:
    n = u0.size
    simplex = np.tile(u0, (n + 1, 1))
    for i in range(n):
        step = scale if u0[i] + scale <= 1.0 else -scale
        simplex[i + 1, i] += step
    return simplex


def fit_params(problem: FitProblem, start: Optional[Mapping[str, float]] = None) -> FitResult:
    """Minimise the squared residuals inside the bounding box.

    Running out of evaluations is not an error: the best point so far comes
    back with converged=False.
    """
    settings = problem.settings
    initial = problem.initial_values() if start is None else {**problem.initial_values(), **start}
    u0 = np.clip(problem.to_scaled(initial), 0.0, 1.0)
    initial = problem.to_physical(u0)
    trace: list[float] = []

    def objective(u: np.ndarray) -> float:
        value = problem.loss(problem.to_physical(np.clip(u, 0.0, 1.0)))
        trace.append(value)
        return value

    res = minimize(
        objective,
        u0,
        method="Nelder-Mead",
        bounds=[(0.0, 1.0)] * u0.size,
        options={
            "xatol": settings.tolerance,
            "fatol": np.inf,
            "maxfev": settings.max_evaluations,
            "initial_simplex": _initial_simplex(u0, settings.initial_simplex_scale),
        },
    )
    best = problem.to_physical(np.clip(res.x, 0.0, 1.0))
    converged = bool(res.status == 0)
    if not converged:
        logger.warning("fit stopped before convergence after %d evaluations: %s", res.nfev, res.message)
    logger.info("fit loss %.6g -> %.6g in %d evaluations", trace[0], res.fun, res.nfev)
    return FitResult(
        values=best,
        loss=float(res.fun),
        evaluations=int(res.nfev),
        converged=converged,
        initial_values=initial,
        initial_loss=trace[0],
        loss_trace=trace,
        message=str(res.message),
    )


def fit_multistart(
    problem: FitProblem, starts: Sequence[Mapping[str, float]], jobs: int = 1
) -> tuple[FitResult, list[FitResult]]:
    """One fit per starting point; the lowest final loss wins (first one on ties)."""
    if not starts:
        result = fit_params(problem)
        return result, [result]
    results = run_ordered(partial(fit_params, problem), [dict(s) for s in starts], jobs, label="multistart")
    best = min(range(len(results)), key=lambda i: results[i].loss)
    return results[best], results
