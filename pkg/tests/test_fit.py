from __future__ import annotations

import pandas as pd
import pytest

from src.core.errors import ConfigError
from src.core.params import PhysParams
from src.core.schemas import UniformProfileSpec
from src.fit.delay import group_delay, od_from_delay
from src.fit.model import SteadyTransmissionModel
from src.fit.solver import FitProblem, FitSettings, fit_multistart, fit_params

ALPHAS = [5.0, 10.0, 19.0, 30.0, 50.0]
TRUE = {"omega_d_peak": 0.41, "gamma21": 8e-4}


@pytest.fixture(scope="module")
def model() -> SteadyTransmissionModel:
    return SteadyTransmissionModel(
        params=PhysParams(alpha=19.0),
        profile=UniformProfileSpec(kind="uniform", omega_c=0.39, omega_d=0.3),
        omega_p0=0.01,
        n_z=201,
        check_convergence=False,
    )


@pytest.fixture(scope="module")
def data(model) -> pd.DataFrame:
    frame = pd.DataFrame({"alpha": ALPHAS})
    predicted = model(TRUE, frame)
    return frame.assign(T_p=predicted[:, 0], T_s=predicted[:, 1])


def test_od_from_delay_matches_slow_light_formula():
    assert od_from_delay(351.3, 0.26, 1.25) == pytest.approx(19.0, rel=1e-3)
    assert od_from_delay(0.0, 0.26, 1.25) == 0.0
    assert od_from_delay(100.0, 0.52, 1.25) == pytest.approx(4 * od_from_delay(100.0, 0.26, 1.25))


def test_dephasing_correction_round_trips():
    delay = group_delay(19.0, 0.26, 1.25, gamma21=5e-4)
    assert delay < group_delay(19.0, 0.26, 1.25)
    assert od_from_delay(delay, 0.26, 1.25, gamma21=5e-4) == pytest.approx(19.0, rel=1e-12)


def test_od_from_delay_rejects_bad_inputs():
    with pytest.raises(ConfigError):
        od_from_delay(-1.0, 0.26, 1.25)
    with pytest.raises(ConfigError):
        od_from_delay(10.0, 0.0, 1.25)
    with pytest.raises(ConfigError, match="no slow light"):
        od_from_delay(10.0, 0.01, 1.25, gamma21=0.1)


def test_model_reads_the_index_column(model):
    single = model(TRUE, pd.DataFrame({"T_s": [0.2]}))
    by_alpha = model(TRUE, pd.DataFrame({"alpha": [19.0]}))
    assert single.shape == (1, 2)
    assert single[0, 1] == by_alpha[0, 1]


def test_two_parameter_round_trip(model, data):
    problem = FitProblem(
        data=data,
        model=model,
        free={"omega_d_peak": (0.1, 1.0), "gamma21": (0.0, 3e-3)},
        start={"omega_d_peak": 0.3, "gamma21": 5e-4},
        settings=FitSettings(tolerance=1e-9, max_evaluations=800),
    )
    result = fit_params(problem)
    assert result.values["omega_d_peak"] == pytest.approx(0.41, rel=0.01)
    assert result.values["gamma21"] == pytest.approx(8e-4, rel=0.01)
    assert result.loss <= result.initial_loss
    assert result.loss_trace[0] == result.initial_loss
    assert result.evaluations == len(result.loss_trace)


def test_zero_residual_fit(model, data):
    problem = FitProblem(
        data=data,
        model=SteadyTransmissionModel(
            params=PhysParams(alpha=19.0, gamma21=8e-4),
            profile=model.profile,
            n_z=201,
        ),
        free={"omega_d_peak": (0.1, 1.0)},
        start={"omega_d_peak": 0.2},
        settings=FitSettings(tolerance=1e-10),
    )
    result = fit_params(problem)
    assert result.converged
    assert result.loss < 1e-12


def test_bounds_excluding_truth_stop_on_the_boundary(model, data):
    problem = FitProblem(
        data=data,
        model=SteadyTransmissionModel(params=PhysParams(alpha=19.0, gamma21=8e-4), profile=model.profile, n_z=201),
        free={"omega_d_peak": (0.5, 0.9)},
        start={"omega_d_peak": 0.7},
    )
    result = fit_params(problem)
    assert result.converged
    assert result.values["omega_d_peak"] == pytest.approx(0.5, abs=1e-5)


def test_fit_is_deterministic(model, data):
    problem = FitProblem(data=data, model=model, free={"omega_d_peak": (0.1, 1.0)}, settings=FitSettings(max_evaluations=40))
    first, second = fit_params(problem), fit_params(problem)
    assert first.values == second.values
    assert first.loss_trace == second.loss_trace


def test_exhausted_budget_is_not_converged(model, data):
    problem = FitProblem(
        data=data,
        model=model,
        free={"omega_d_peak": (0.1, 1.0), "gamma21": (0.0, 3e-3)},
        settings=FitSettings(max_evaluations=5),
    )
    result = fit_params(problem)
    assert not result.converged
    assert result.loss <= result.initial_loss


def test_multistart_keeps_the_lowest_loss(model, data):
    problem = FitProblem(
        data=data,
        model=model,
        free={"omega_d_peak": (0.1, 1.0)},
        settings=FitSettings(max_evaluations=30),
    )
    best, runs = fit_multistart(problem, [{"omega_d_peak": 0.9}, {"omega_d_peak": 0.45}])
    assert len(runs) == 2
    assert best.loss == min(r.loss for r in runs)


@pytest.mark.parametrize(
    "free, message",
    [
        ({}, "at least one free parameter"),
        ({"omega_x": (0.0, 1.0)}, "unknown fit parameter"),
        ({"gamma21": (1e-3, 1e-4)}, "lower < upper"),
    ],
)
def test_problem_validation(model, data, free, message):
    with pytest.raises(ConfigError, match=message):
        FitProblem(data=data, model=model, free=free)


def test_data_needs_an_observable(model):
    with pytest.raises(ConfigError, match="columns"):
        FitProblem(data=pd.DataFrame({"alpha": [1.0]}), model=model, free={"gamma21": (0.0, 1e-3)})
