from __future__ import annotations

import json
from pathlib import Path

import pandas as pd
import pytest

from src.cli.io import read_metadata
from src.cli.main import EXIT_CONFIG, EXIT_IO, EXIT_OK, EXIT_SOLVER, main
from src.cli.manifest import RunManifest
from src.propagation.analytic import uniform_conversion_limit

UNIFORM = {
    "alpha": 19,
    "profile": {"kind": "uniform", "omega_c": 0.26, "omega_d": 0.26},
    "grid": {"n_z": 401},
}


def _read(path: Path) -> pd.DataFrame:
    return pd.read_csv(path, comment="#")


def _json(path: Path) -> dict:
    return json.loads(path.read_text(encoding="utf-8"))


def test_steady_run_writes_fields_summary_and_manifest(tmp_path, write_config):
    out = tmp_path / "steady"
    code = main(["steady", "--config", str(write_config(UNIFORM)), "--out-dir", str(out)])
    assert code == EXIT_OK

    summary = _json(out / "steady_summary.json")
    assert summary["CE"] == pytest.approx(uniform_conversion_limit(19.0), abs=1e-6)
    assert summary["analytic"]["CE"] == pytest.approx(uniform_conversion_limit(19.0))

    table = _read(out / "steady_fields.csv")
    assert list(table.columns[:7]) == ["z", "omega_c", "omega_d", "re_p", "im_p", "re_s", "im_s"]
    assert len(table) == 401
    assert read_metadata(out / "steady_fields.csv")["alpha"] == 19

    manifest = _json(out / "manifest.json")
    assert manifest["subcommand"] == "steady"
    assert manifest["outputs"] == ["steady_fields.csv", "steady_summary.json"]
    assert all(manifest["converged"].values())


def test_manifest_reruns_identically(tmp_path, write_config):
    first, second = tmp_path / "a", tmp_path / "b"
    assert main(["steady", "--config", str(write_config(UNIFORM)), "--out-dir", str(first)]) == EXIT_OK
    assert main(["steady", "--config", str(first / "manifest.json"), "--out-dir", str(second)]) == EXIT_OK
    for name in ("steady_fields.csv", "steady_summary.json"):
        assert (first / name).read_bytes() == (second / name).read_bytes()
    assert _json(first / "manifest.json")["config_snapshot"] == _json(second / "manifest.json")["config_snapshot"]


def test_override_changes_the_run(tmp_path, write_config):
    out = tmp_path / "off"
    code = main(
        ["steady", "--config", str(write_config(UNIFORM)), "--set", "profile.omega_d=0", "--out-dir", str(out)]
    )
    assert code == EXIT_OK
    summary = _json(out / "steady_summary.json")
    assert summary["CE"] == 0.0
    assert _json(out / "manifest.json")["config_snapshot"]["profile"]["omega_d"] == 0


def test_zero_amplitude_pulse_exits_cleanly(tmp_path, write_config):
    doc = {
        "alpha": 5,
        "profile": {"kind": "uniform", "omega_c": 1.0, "omega_d": 1.0},
        "pulse": {"peak": 0.0, "fwhm": 40.0, "t0": 80.0},
        "grid": {"n_z": 500, "n_t": 481, "t_span": 240.0, "check_convergence": False},
    }
    out = tmp_path / "pulse"
    assert main(["pulse", "--config", str(write_config(doc)), "--out-dir", str(out)]) == EXIT_OK

    traces = _read(out / "pulse_traces.csv")
    for col in ("t_over_Gamma", "t_us", "re_p_out", "im_p_out", "re_s_out", "im_s_out"):
        assert col in traces.columns
    assert (traces[["re_p_out", "re_s_out"]] == 0.0).all().all()
    summary = _json(out / "pulse_summary.json")
    assert summary["T_p"] == 0.0 and summary["T_s"] == 0.0
    assert _json(out / "manifest.json")["converged"] == {"pulse": None}
    assert summary["checks"]["converged"] is None


def test_single_point_od_sweep_matches_steady(tmp_path, write_config):
    doc = {**UNIFORM, "sweep": {"values": [19.0]}}
    sweep_out, steady_out = tmp_path / "sweep", tmp_path / "steady"
    cfg = str(write_config(doc))
    assert main(["sweep", "--config", cfg, "--axis", "od", "--out-dir", str(sweep_out)]) == EXIT_OK
    assert main(["steady", "--config", cfg, "--out-dir", str(steady_out)]) == EXIT_OK

    row = _read(sweep_out / "sweep_od.csv").iloc[0]
    steady = _json(steady_out / "steady_summary.json")
    assert row["CE"] == pytest.approx(steady["CE"], rel=1e-12)
    assert row["T_p"] == pytest.approx(steady["T_p"], rel=1e-12)
    assert _json(sweep_out / "sweep_summary.json")["peak"]["alpha"] == 19.0


def test_small_ds_sweep(tmp_path, write_config):
    doc = {
        "alpha": 19,
        "gamma21": 8e-4,
        "profile": {"kind": "gaussian-pair", "omega_c": 0.39, "omega_d": 0.41, "n_rays": 3},
        "grid": {"n_z": 201, "check_convergence": False},
        "sweep": {"axis": "ds", "values": [3.0, 54.0], "gamma21_bands": [5e-4]},
    }
    out = tmp_path / "ds"
    assert main(["sweep", "--config", str(write_config(doc)), "--out-dir", str(out)]) == EXIT_OK

    table = _read(out / "sweep_ds.csv")
    assert list(table["ds_um"]) == [3.0, 54.0]
    assert ((table["T_s"] >= 0) & (table["T_p"] + table["T_s"] <= 1.0)).all()
    rays = _read(out / "sweep_ds_rays.csv")
    assert len(rays) == 6
    bands = _read(out / "sweep_ds_bands.csv")
    assert set(bands["gamma21"]) == {5e-4}
    assert _json(out / "manifest.json")["outputs"][-1] == "sweep_summary.json"
    assert set(_json(out / "manifest.json")["converged"].values()) == {None}


def test_od_sweep_rejects_pulse_runs(tmp_path, write_config):
    doc = {**UNIFORM, "sweep": {"axis": "od", "values": [5.0], "run": "pulse"}}
    assert main(["sweep", "--config", str(write_config(doc)), "--out-dir", str(tmp_path)]) == EXIT_CONFIG


def test_malformed_fit_data_names_the_line(tmp_path, write_config, caplog):
    data = tmp_path / "data.csv"
    data.write_text("# measured\nalpha,T_s\n5,0.1\n10,abc\n", encoding="utf-8")
    doc = {**UNIFORM, "fit": {"free": {"omega_d_peak": [0.1, 1.0]}}}
    code = main(["fit", "--config", str(write_config(doc)), "--data", str(data), "--out-dir", str(tmp_path / "fit")])
    assert code == EXIT_CONFIG
    assert "line 4" in caplog.text


def test_fit_round_trip_through_the_cli(tmp_path, write_config):
    truth = tmp_path / "truth"
    doc = {**UNIFORM, "grid": {"n_z": 201, "check_convergence": False}, "sweep": {"axis": "od", "values": [5.0, 19.0, 40.0]}}
    assert main(["sweep", "--config", str(write_config(doc, "truth.json")), "--out-dir", str(truth)]) == EXIT_OK
    observed = _read(truth / "sweep_od.csv").rename(columns={"CE": "T_s"})
    data = tmp_path / "observed.csv"
    observed.to_csv(data, index=False)

    fit_doc = {
        **doc,
        "profile": {"kind": "uniform", "omega_c": 0.26, "omega_d": 0.4},
        "fit": {"free": {"omega_d_peak": [0.1, 0.6]}, "tolerance": 1e-9},
    }
    out = tmp_path / "fit"
    code = main(["fit", "--config", str(write_config(fit_doc, "fit.json")), "--data", str(data), "--out-dir", str(out)])
    assert code == EXIT_OK
    report = _json(out / "fit_report.json")
    assert report["values"]["omega_d_peak"] == pytest.approx(0.26, rel=1e-3)
    assert report["converged"]
    predictions = _read(out / "fit_predictions.csv")
    assert {"T_p_model", "T_s_model"} <= set(predictions.columns)


def test_od_from_delay_mode(tmp_path):
    out = tmp_path / "od"
    code = main(["fit", "--mode", "od-from-delay", "--delay", "351.3", "--omega-c", "0.26", "--out-dir", str(out)])
    assert code == EXIT_OK
    assert _json(out / "od_from_delay.json")["alpha"] == pytest.approx(19.0, rel=1e-3)
    snapshot = _json(out / "manifest.json")["config_snapshot"]
    assert snapshot["mode"] == "od-from-delay"

    rerun = tmp_path / "rerun"
    assert main(["fit", "--config", str(out / "manifest.json"), "--out-dir", str(rerun)]) == EXIT_OK
    assert (rerun / "od_from_delay.json").read_bytes() == (out / "od_from_delay.json").read_bytes()


def test_missing_alpha_is_a_config_error(tmp_path, write_config, caplog):
    doc = {k: v for k, v in UNIFORM.items() if k != "alpha"}
    assert main(["steady", "--config", str(write_config(doc)), "--out-dir", str(tmp_path)]) == EXIT_CONFIG
    assert "missing required key: alpha" in caplog.text


def test_missing_config_file_is_an_io_error(tmp_path):
    assert main(["steady", "--config", str(tmp_path / "nope.json"), "--out-dir", str(tmp_path)]) == EXIT_IO


def test_unresolved_grid_is_a_solver_error(tmp_path, write_config):
    doc = {"alpha": 240, "profile": {"kind": "sincos", "omega_0": 1.0}, "grid": {"n_z": 3}}
    assert main(["steady", "--config", str(write_config(doc)), "--out-dir", str(tmp_path)]) == EXIT_SOLVER


def test_manifest_convergence_flags():
    manifest = RunManifest(subcommand="steady", config_snapshot={}, converged={"steady": True, "transverse": None})
    assert manifest.all_converged
    assert manifest.unchecked == ["transverse"]
    manifest.converged["steady"] = False
    assert not manifest.all_converged
