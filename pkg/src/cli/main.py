"""Command-line front end: steady, pulse, sweep and fit runs.

    python -m src.cli.main steady --config presets/fig3.json
    python -m src.cli.main sweep --config presets/fig7.json --axis ds --jobs 4
    python -m src.cli.main fit --mode od-from-delay --delay 351.3 --omega-c 0.26

Every run writes its tables and summaries to --out-dir plus a manifest.json
whose config_snapshot can be passed back to --config for an identical rerun.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np
import pandas as pd

try:
    from dotenv import load_dotenv  # type: ignore
except Exception:
    load_dotenv = None

from src.bloch.normal_modes import to_normal_modes
from src.cli.io import read_data_table, write_csv, write_json
from src.cli.manifest import RunManifest
from src.core.config import ValidatedConfig, apply_overrides, load_config, validate_config
from src.core.errors import ConfigError, DataFileError, SolverError, UndefinedBasisError
from src.core.grid import build_grid
from src.core.parallel import default_jobs
from src.core.schemas import GaussianPairProfileSpec, SinCosProfileSpec, UniformProfileSpec
from src.fit.delay import od_from_delay
from src.fit.model import SteadyTransmissionModel
from src.fit.solver import FitProblem, FitSettings, fit_multistart
from src.geometry.beams import RayRun, sweep_ds, sweep_ds_bands, transverse_average
from src.geometry.profiles import build_profile, geometry_from_spec
from src.propagation.analytic import analytic_sincos, sincos_large_od, uniform_conversion_limit
from src.propagation.pulse import PulseSpec, simulate_pulse
from src.propagation.steady_state import integrate_steady, sweep_od

logger = logging.getLogger("fwm")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_IO = 4

Outcome = tuple[list[str], dict[str, Optional[bool]]]


def _metadata(cfg: ValidatedConfig, subcommand: str) -> dict[str, Any]:
    meta: dict[str, Any] = {"subcommand": subcommand, **cfg.params.to_config()}
    if cfg.profile is not None:
        meta["profile"] = cfg.profile.model_dump(mode="json")
    return meta


def _analytic_reference(cfg: ValidatedConfig) -> Optional[dict[str, float]]:
    """Closed-form outputs when the run sits in a solvable limit (γ21 = 0, γ31 = γ41)."""
    p = cfg.params
    if p.gamma21 != 0.0 or p.gamma31 != p.gamma41:
        return None
    spec = cfg.profile
    if isinstance(spec, SinCosProfileSpec):
        t_p, ce = analytic_sincos(p.alpha)
        t_p_large, ce_large = sincos_large_od(p.alpha)
        return {"T_p": t_p, "CE": ce, "T_p_large_od": t_p_large, "CE_large_od": ce_large}
    if isinstance(spec, UniformProfileSpec) and spec.omega_c == spec.omega_d and spec.omega_c != 0.0:
        return {"CE": uniform_conversion_limit(p.alpha)}
    return None


def _pulse_grids(cfg: ValidatedConfig):
    grid = cfg.grid
    if grid.n_t is None or grid.t_span is None:
        raise ConfigError("pulse runs need grid.n_t and grid.t_span")
    return build_grid(grid.n_z, grid.n_t, grid.t_span)


def _pulse_spec(cfg: ValidatedConfig) -> PulseSpec:
    return PulseSpec() if cfg.pulse is None else PulseSpec.from_model(cfg.pulse)


def cmd_steady(cfg: ValidatedConfig, out_dir: Path, jobs: int) -> Outcome:
    spec = cfg.require_profile()
    profile = build_profile(spec, cfg.params)
    sol = integrate_steady(
        profile, cfg.params, cfg.omega_p0, n_z=cfg.grid.n_z, check_convergence=cfg.grid.check_convergence
    )
    z = sol.fields.z_grid
    c, d = profile.evaluate(z)
    table = pd.DataFrame(
        {
            "z": z,
            "omega_c": c.real,
            "omega_d": d.real,
            "re_p": sol.fields.omega_p.real,
            "im_p": sol.fields.omega_p.imag,
            "re_s": sol.fields.omega_s.real,
            "im_s": sol.fields.omega_s.imag,
        }
    )
    try:
        modes = sol.normal_modes(profile)
        table["abs_T"] = np.abs(modes.omega_T)
        table["abs_D"] = np.abs(modes.omega_D)
    except UndefinedBasisError as e:
        logger.warning("normal-mode columns skipped: %s", e)

    summary: dict[str, Any] = {"T_p": sol.T_p, "CE": sol.CE, "checks": sol.checks.to_dict()}
    reference = _analytic_reference(cfg)
    if reference is not None:
        summary["analytic"] = reference
    converged = {"steady": sol.checks.converged}

    if isinstance(spec, GaussianPairProfileSpec) and spec.n_rays > 1:
        run = RayRun(kind="cw", omega_p0=cfg.omega_p0, n_z=cfg.grid.n_z, check_convergence=cfg.grid.check_convergence)
        avg = transverse_average(geometry_from_spec(spec, cfg.params), cfg.params, run, spec.n_rays, jobs=jobs)
        summary["transverse"] = {"T_p": avg.T_p, "T_s": avg.T_s, "n_rays": spec.n_rays}
        converged["transverse"] = True if run.check_convergence else None

    meta = _metadata(cfg, "steady")
    write_csv(out_dir / "steady_fields.csv", table, meta)
    write_json(out_dir / "steady_summary.json", summary)
    logger.info("steady: T_p=%.6g CE=%.6g", sol.T_p, sol.CE)
    return ["steady_fields.csv", "steady_summary.json"], converged


def cmd_pulse(cfg: ValidatedConfig, out_dir: Path, jobs: int) -> Outcome:
    spec = cfg.require_profile()
    grids = _pulse_grids(cfg)
    pulse = _pulse_spec(cfg)
    check = cfg.grid.check_convergence
    res = simulate_pulse(pulse, build_profile(spec, cfg.params), cfg.params, grids, check_convergence=check)

    t = res.t_grid
    traces = pd.DataFrame(
        {
            "t_over_Gamma": t,
            "t_us": t / res.gamma_unit * 1e6,
            "re_p_in": res.input_probe.real,
            "im_p_in": res.input_probe.imag,
            "re_p_out": res.output_probe.real,
            "im_p_out": res.output_probe.imag,
            "re_s_out": res.output_signal.real,
            "im_s_out": res.output_signal.imag,
        }
    )
    energy = pd.DataFrame({"z": res.z_grid, "energy_p": res.energy_p_z, "energy_s": res.energy_s_z})
    summary: dict[str, Any] = {**res.summary(), "checks": res.checks.to_dict()}
    converged = {"pulse": res.checks.converged}
    outputs = ["pulse_traces.csv", "pulse_energy_z.csv", "pulse_summary.json"]

    meta = {**_metadata(cfg, "pulse"), "pulse": cfg.pulse.model_dump(mode="json") if cfg.pulse else {}}
    if isinstance(spec, GaussianPairProfileSpec) and spec.n_rays > 1:
        run = RayRun(kind="pulse", pulse=pulse, grids=grids, check_convergence=check)
        avg = transverse_average(geometry_from_spec(spec, cfg.params), cfg.params, run, spec.n_rays, jobs=jobs)
        summary["transverse"] = {
            "T_p": avg.T_p,
            "T_s": avg.T_s,
            "delay_p": avg.delay_p,
            "delay_s": avg.delay_s,
            "n_rays": spec.n_rays,
        }
        converged["transverse"] = True if run.check_convergence else None
        write_csv(out_dir / "pulse_rays.csv", avg.rays, meta)
        outputs.insert(2, "pulse_rays.csv")

    write_csv(out_dir / "pulse_traces.csv", traces, meta)
    write_csv(out_dir / "pulse_energy_z.csv", energy, meta)
    write_json(out_dir / "pulse_summary.json", summary)
    logger.info(
        "pulse: T_p=%.6g T_s=%.6g delay_p=%.6g/Gamma (%.4g us)",
        res.T_p,
        res.T_s,
        res.delay_p,
        res.delay_p_seconds * 1e6,
    )
    return outputs, converged


def _peak(table: pd.DataFrame, x: str, y: str) -> dict[str, Any]:
    if table.empty:
        return {x: None, y: None}
    row = table.loc[table[y].idxmax()]
    return {x: float(row[x]), y: float(row[y])}


def cmd_sweep(cfg: ValidatedConfig, out_dir: Path, jobs: int) -> Outcome:
    sweep = cfg.sweep
    if sweep is None or sweep.axis is None:
        raise ConfigError("missing required key: sweep.axis (or pass --axis)")
    spec = cfg.require_profile()
    meta = {**_metadata(cfg, "sweep"), "sweep": sweep.model_dump(mode="json")}
    check = cfg.grid.check_convergence

    if sweep.axis == "od":
        if sweep.run != "cw":
            raise ConfigError("optical-density sweeps run in CW mode only")
        table = sweep_od(
            sweep.values,
            build_profile(spec, cfg.params),
            cfg.params,
            cfg.omega_p0,
            n_z=cfg.grid.n_z,
            check_convergence=check,
            jobs=jobs,
        )
        converged = {
            f"alpha={a:g}": None if pd.isna(ok) else bool(ok) for a, ok in zip(table["alpha"], table["converged"])
        }
        write_csv(out_dir / "sweep_od.csv", table.drop(columns="converged"), meta)
        write_json(out_dir / "sweep_summary.json", {"axis": "od", "rows": len(table), "peak": _peak(table, "alpha", "CE")})
        return ["sweep_od.csv", "sweep_summary.json"], converged

    if not isinstance(spec, GaussianPairProfileSpec):
        raise ConfigError("a ds sweep needs a gaussian-pair profile")
    geom = geometry_from_spec(spec, cfg.params)
    if sweep.run == "cw":
        run = RayRun(kind="cw", omega_p0=cfg.omega_p0, n_z=cfg.grid.n_z, check_convergence=check)
    else:
        run = RayRun(kind="pulse", pulse=_pulse_spec(cfg), grids=_pulse_grids(cfg), check_convergence=check)

    table, rays = sweep_ds(
        sweep.values, geom, cfg.params, run, spec.n_rays, overrides=sweep.overrides, jobs=jobs, return_rays=True
    )
    outputs = ["sweep_ds.csv", "sweep_ds_rays.csv"]
    write_csv(out_dir / "sweep_ds.csv", table, meta)
    write_csv(out_dir / "sweep_ds_rays.csv", rays, meta)
    summary: dict[str, Any] = {"axis": "ds", "run": sweep.run, "rows": len(table), "peak": _peak(table, "ds_um", "T_s")}
    if sweep.gamma21_bands:
        bands = sweep_ds_bands(
            sweep.values,
            geom,
            cfg.params,
            run,
            sweep.gamma21_bands,
            spec.n_rays,
            overrides=sweep.overrides,
            jobs=jobs,
        )
        write_csv(out_dir / "sweep_ds_bands.csv", bands, meta)
        outputs.append("sweep_ds_bands.csv")
        summary["band_peaks"] = {
            f"{g21:g}": _peak(bands[bands["gamma21"] == g21], "ds_um", "T_s") for g21 in sweep.gamma21_bands
        }
    write_json(out_dir / "sweep_summary.json", summary)
    outputs.append("sweep_summary.json")
    converged = {f"ds={ds:g}": True if check else None for ds in table["ds_um"]}
    return outputs, converged


def cmd_fit(cfg: ValidatedConfig, out_dir: Path, jobs: int) -> Outcome:
    fit = cfg.fit
    if fit is None:
        raise ConfigError("missing required key: fit")
    if fit.data is None:
        raise ConfigError("missing required key: fit.data (or pass --data)")
    data = read_data_table(fit.data)
    model = SteadyTransmissionModel(
        params=cfg.params,
        profile=cfg.require_profile(),
        omega_p0=cfg.omega_p0,
        n_z=cfg.grid.n_z,
        check_convergence=cfg.grid.check_convergence,
    )
    settings = FitSettings(
        tolerance=fit.tolerance,
        max_evaluations=fit.max_evaluations,
        initial_simplex_scale=fit.initial_simplex_scale,
    )
    problem = FitProblem(data=data, model=model, free=dict(fit.free), start=dict(fit.start), settings=settings)
    best, runs = fit_multistart(problem, fit.starts, jobs)

    predicted = model(best.values, data)
    table = data.assign(T_p_model=predicted[:, 0], T_s_model=predicted[:, 1])
    report = {
        **best.to_dict(),
        "settings": fit.model_dump(mode="json"),
        "starts": [{"initial_values": r.initial_values, "values": r.values, "loss": r.loss, "converged": r.converged} for r in runs],
    }
    write_csv(out_dir / "fit_predictions.csv", table, _metadata(cfg, "fit"))
    write_json(out_dir / "fit_report.json", report)
    logger.info("fit: %s loss=%.6g converged=%s", best.values, best.loss, best.converged)
    return ["fit_predictions.csv", "fit_report.json"], {"fit": best.converged}


def cmd_od_from_delay(inputs: dict[str, float], out_dir: Path) -> Outcome:
    alpha = od_from_delay(inputs["delay"], inputs["omega_c"], inputs["gamma31"], inputs["gamma21"])
    write_json(out_dir / "od_from_delay.json", {**inputs, "alpha": alpha})
    logger.info("od-from-delay: alpha=%.6g", alpha)
    return ["od_from_delay.json"], {"od_from_delay": True}


COMMANDS = {"steady": cmd_steady, "pulse": cmd_pulse, "sweep": cmd_sweep, "fit": cmd_fit}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fwm", description="Double-Lambda FWM simulation and calibration")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config or a previous run's manifest.json")
    common.add_argument(
        "--set",
        action="append",
        default=[],
        metavar="KEY.PATH=VALUE",
        help="Override a config value, e.g. profile.delta_s_um=54 (repeatable)",
    )
    common.add_argument("--out-dir", default=None, help="Output directory (default results/<command>)")
    common.add_argument("--jobs", type=int, default=None, help="Worker processes (default from FWM_JOBS, else 1)")

    sub.add_parser("steady", parents=[common], help="CW propagation along the medium")
    sub.add_parser("pulse", parents=[common], help="Pulse propagation in the retarded frame")
    p_sweep = sub.add_parser("sweep", parents=[common], help="Optical-density or beam-separation sweep")
    p_sweep.add_argument("--axis", choices=["od", "ds"], default=None)
    p_fit = sub.add_parser("fit", parents=[common], help="Fit parameters or invert a slow-light delay")
    p_fit.add_argument("--mode", choices=["params", "od-from-delay"], default=None)
    p_fit.add_argument("--data", default=None, help="CSV with alpha or ds_um and T_p/T_s columns")
    p_fit.add_argument("--delay", type=float, default=None, help="Measured probe delay in units of 1/Gamma")
    p_fit.add_argument("--omega-c", type=float, default=None)
    p_fit.add_argument("--gamma31", type=float, default=None)
    p_fit.add_argument("--gamma21", type=float, default=None)
    return parser


def _delay_inputs(args: argparse.Namespace, raw: dict[str, Any]) -> dict[str, float]:
    inputs = {
        "delay": args.delay if args.delay is not None else raw.get("delay"),
        "omega_c": args.omega_c if args.omega_c is not None else raw.get("omega_c"),
        "gamma31": args.gamma31 if args.gamma31 is not None else raw.get("gamma31", 1.25),
        "gamma21": args.gamma21 if args.gamma21 is not None else raw.get("gamma21", 0.0),
    }
    for key in ("delay", "omega_c"):
        if inputs[key] is None:
            raise ConfigError(f"od-from-delay mode needs --{key.replace('_', '-')}")
    return {k: float(v) for k, v in inputs.items()}


def _execute(args: argparse.Namespace) -> int:
    raw = load_config(args.config) if args.config else {}
    raw = apply_overrides(raw, args.set)
    out_dir = Path(args.out_dir or Path("results") / args.command)
    jobs = args.jobs if args.jobs is not None else default_jobs()

    started = time.perf_counter()
    if args.command == "fit" and (args.mode == "od-from-delay" or (args.mode is None and raw.get("mode") == "od-from-delay")):
        inputs = _delay_inputs(args, raw)
        outputs, converged = cmd_od_from_delay(inputs, out_dir)
        snapshot: dict[str, Any] = {"mode": "od-from-delay", **inputs}
    else:
        if args.command == "sweep" and args.axis is not None:
            raw = apply_overrides(raw, [f"sweep.axis={args.axis}"])
        if args.command == "fit" and args.data is not None:
            raw.setdefault("fit", {})["data"] = str(args.data)
        cfg = validate_config(raw)
        outputs, converged = COMMANDS[args.command](cfg, out_dir, jobs)
        snapshot = cfg.snapshot

    manifest = RunManifest(
        subcommand=args.command,
        config_snapshot=snapshot,
        outputs=outputs,
        wall_clock_s=round(time.perf_counter() - started, 3),
        converged=converged,
    )
    manifest.write(out_dir)
    if not manifest.all_converged:
        logger.error("not every solver converged: %s", [k for k, v in converged.items() if v is False])
        return EXIT_SOLVER
    if manifest.unchecked:
        logger.warning("refinement check skipped for %s; convergence recorded as null", manifest.unchecked)
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    if load_dotenv is not None:
        load_dotenv()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s [%(levelname)s] %(message)s")
    args = _build_parser().parse_args(argv)
    try:
        return _execute(args)
    except (ConfigError, DataFileError) as e:
        logger.error("%s", e)
        return EXIT_CONFIG
    except SolverError as e:
        logger.error("%s", e)
        return EXIT_SOLVER
    except OSError as e:
        logger.error("%s", e)
        return EXIT_IO
    except ValueError as e:
        logger.error("%s", e)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
