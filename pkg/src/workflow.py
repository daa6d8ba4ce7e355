# Copyright (c) 2025 Bytedance Ltd. and/or its affiliates
# SPDX-License-Identifier: MIT

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from src.config import Configuration, RunConfig, SolverSettings
from src.explore import (
    EXTERNAL_INPUT_WEIGHT,
    DesiredCurveFamily,
    ExplorationResult,
    explore,
    initial_trajectory,
    load_external_curve,
    load_track,
    position_rms,
    track_family,
)
from src.manifold import (
    ManifoldBranch,
    solve_point,
    sweep_parameter,
    trace_speeds,
    understeer_gradient,
)
from src.tire import (
    cornering_stiffness,
    force_envelope,
    linear_lateral,
    linear_longitudinal,
    longitudinal_stiffness,
    pure_lateral,
    pure_longitudinal,
)
from src.trajopt import Curve, Weights, integrate, resample_inputs, trajectory_report
from src.utils.decorators import log_io
from src.utils.exceptions import (
    ExplorationError,
    InvalidInputError,
    LtcarError,
    NumericalError,
)
from src.utils.output import OutputWriter, stable_hash
from src.vehicle import INPUT_NAMES, STATE_NAMES, CarModel

# Configure logging
logging.basicConfig(
    level=logging.INFO,  # Default level is INFO
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
)


def enable_debug_logging():
    """Enable debug level logging for more detailed execution information."""
    logging.getLogger("src").setLevel(logging.DEBUG)


logger = logging.getLogger(__name__)

# K_us samples kept per branch in the summary
KUS_SAMPLES = 20


def _writer(config: RunConfig, run: Configuration) -> OutputWriter:
    return OutputWriter(Path(run.output_dir), config.config_hash(), force=run.force)


def car_model(
    config: RunConfig,
    kind: str = "ltcar",
    drive: str = "rear",
    tire_mode: Optional[str] = None,
) -> CarModel:
    """Car model of a configuration with the run-specific variant applied."""
    tires = config.tire_set()
    if tire_mode is not None:
        tires = tires.with_mode(tire_mode)
    return CarModel(
        vehicle=config.vehicle_params(),
        tires=tires,
        kind=kind,
        drive=drive,
        vx_min=config.solver_settings().vx_min,
    )


def _metadata(command: str, model: CarModel, **extra: Any) -> Dict[str, Any]:
    description = model.describe()
    return {
        "command": command,
        "model": description["kind"],
        "tire_mode": description["tire_mode"],
        "param_hash": stable_hash(description),
        **extra,
    }


def _grid(spec) -> np.ndarray:
    return np.linspace(spec.start, spec.stop, spec.num)


@log_io
def run_tire(config: RunConfig, run: Configuration) -> List[Path]:
    """Pure-slip curves at each normal load and the combined-slip envelope."""
    cmd = config.tire
    tires = config.tire_set()
    kappa, beta = _grid(cmd.kappa), _grid(cmd.beta)
    longitudinal, lateral, envelope = [], [], []
    for axle in cmd.axles:
        p = tires.axle(axle)
        for load in cmd.loads:
            lon = {"axle": axle, "fz": load, "kappa": kappa}
            lon["fx"] = load * pure_longitudinal(kappa, p)
            lat = {"axle": axle, "fz": load, "beta": beta}
            lat["fy"] = load * pure_lateral(beta, p)
            if cmd.linear_overlay:
                c_x, c_y = longitudinal_stiffness(p), cornering_stiffness(p)
                lon["fx_linear"] = load * linear_longitudinal(kappa, c_x)
                lat["fy_linear"] = load * linear_lateral(beta, c_y)
            longitudinal.append(pd.DataFrame(lon))
            lateral.append(pd.DataFrame(lat))
            sweep = force_envelope(kappa, cmd.envelope_betas, p, load)
            sweep.insert(0, "axle", axle)
            envelope.append(sweep)

    writer = _writer(config, run)
    meta = {
        "command": "tire",
        "tire_mode": tires.mode,
        "param_hash": stable_hash(tires.model_dump()),
        "grid": {"kappa": cmd.kappa.model_dump(), "beta": cmd.beta.model_dump()},
    }
    tables = {
        "tire_longitudinal.csv": longitudinal,
        "tire_lateral.csv": lateral,
        "tire_envelope.csv": envelope,
    }
    return [
        writer.write_frame(name, pd.concat(frames, ignore_index=True), meta)
        for name, frames in tables.items()
    ]


def _continuation_options(settings: SolverSettings) -> Dict[str, Any]:
    return {
        "eps0": settings.eps0,
        "nu": settings.nu,
        "max_points": settings.max_points,
        "max_corrector_iter": settings.max_corrector_iter,
        "scale": settings.scale,
        "delta_limit": np.radians(settings.delta_limit_deg),
        "min_step": settings.min_step,
    }


def _branch_name(branch: ManifoldBranch) -> str:
    label = branch.label
    suffix = "_mirror" if label.get("orientation", 1) < 0 else ""
    if "param" in label:
        return f"sweep_{label['param']}{label['value']:g}_v{branch.v:g}{suffix}.csv"
    return f"branch_v{branch.v:g}{suffix}.csv"


def _understeer_samples(
    branch: ManifoldBranch, limit: float
) -> Optional[List[Dict[str, float]]]:
    try:
        k_us = understeer_gradient(branch, a_lat_max=limit)
    except (InvalidInputError, NumericalError) as e:
        logger.warning(f"No understeer gradient for {_branch_name(branch)}: {e}")
        return None
    stride = max(1, len(k_us) // KUS_SAMPLES)
    picked = k_us.iloc[::stride]
    return [{"a_lat": float(a), "k_us": float(k)} for a, k in picked.items()]


@log_io
def run_equilibria(config: RunConfig, run: Configuration) -> List[Path]:
    """Trace equilibrium branches per speed and the optional parameter sweep."""
    cmd = config.equilibria
    settings = config.solver_settings()
    model = car_model(config, kind=cmd.model, tire_mode=cmd.tire_mode)
    options = _continuation_options(settings)
    branches = trace_speeds(cmd.speeds, model, run.threads, cmd.mirror, **options)
    if cmd.sweep is not None:
        sweep = cmd.sweep
        branches += sweep_parameter(
            sweep.param, sweep.values, sweep.speed, model, run.threads, **options
        )
    if not branches:
        raise NumericalError("Every equilibrium branch failed")

    writer = _writer(config, run)
    written, summaries = [], []
    for branch in branches:
        name = _branch_name(branch)
        meta = _metadata("equilibria", model, branch=branch.label, grid={"v": branch.v})
        written.append(writer.write_frame(name, branch.to_frame(), meta))
        summary = branch.summary()
        summary["file"] = name
        summary["k_us"] = _understeer_samples(branch, cmd.understeer_limit)
        summaries.append(summary)
    written.append(
        writer.write_json(
            "equilibria_summary.json",
            {"model": model.describe(), "branches": summaries},
            _metadata("equilibria", model),
        )
    )
    return written


def _inputs_from_file(path: str, times: np.ndarray) -> np.ndarray:
    frame = pd.read_csv(path)
    if "t" not in frame.columns:
        raise InvalidInputError(f"Input file {path} has no 't' column")
    file_times = frame["t"].to_numpy(dtype=np.float64)
    if np.any(np.diff(file_times) <= 0.0):
        raise InvalidInputError(f"Time column of {path} is not strictly increasing")
    values = np.zeros((len(frame), len(INPUT_NAMES)))
    for j, name in enumerate(INPUT_NAMES):
        if name in frame.columns:
            values[:, j] = frame[name].to_numpy(dtype=np.float64)
    return resample_inputs(file_times, values, times, hold=True)


@log_io
def run_simulate(config: RunConfig, run: Configuration) -> List[Path]:
    """Integrate from an initial state under constant, ramped or tabulated inputs."""
    cmd = config.simulate
    settings = config.solver_settings()
    model = car_model(config, kind=cmd.model, drive=cmd.drive)
    dt = settings.dt
    times = dt * np.arange(int(round(cmd.duration / dt)) + 1)

    state = np.zeros(len(STATE_NAMES))
    base = np.zeros(len(INPUT_NAMES))
    if cmd.equilibrium is not None:
        point = solve_point(cmd.equilibrium.v, cmd.equilibrium.a_lat, model, nu=settings.nu)
        state = point.state().as_array()
        base = point.car_input().as_array()
    for name, value in cmd.initial_state.items():
        state[STATE_NAMES.index(name)] = value
    for name, value in cmd.inputs.items():
        base[INPUT_NAMES.index(name)] = value
    rates = np.array([cmd.input_rates.get(name, 0.0) for name in INPUT_NAMES])

    if cmd.inputs_file:
        inputs = _inputs_from_file(cmd.inputs_file, times)
    else:
        inputs = base + times[:, None] * rates

    traj = integrate(state, inputs, model, dt)
    writer = _writer(config, run)
    meta = _metadata("simulate", model, grid={"dt": dt, "samples": len(times)})
    report = trajectory_report(model, traj)
    return [writer.write_frame("simulate_trajectory.csv", report, meta)]


def _weights(config: RunConfig, external: bool) -> Weights:
    spec = config.weights
    weights = Weights.diagonal(spec.Q, spec.R, spec.P1, spec.Q_K, spec.R_K)
    if external and "R" not in spec.model_fields_set:
        light = EXTERNAL_INPUT_WEIGHT * np.eye(len(INPUT_NAMES))
        weights = weights.with_input_weight(light)
    return weights


def _comparison(desired: Curve, optimal: Curve, bicycle: Optional[Curve]) -> pd.DataFrame:
    columns: Dict[str, np.ndarray] = {"t": desired.times}
    names = (*STATE_NAMES, *INPUT_NAMES)
    sources = [("desired", desired), ("optimal", optimal)]
    if bicycle is not None:
        sources.append(("bicycle", bicycle))
    for name_index, name in enumerate(names):
        for label, curve in sources:
            data = np.column_stack([curve.states, curve.inputs])
            columns[f"{name}_{label}"] = data[:, name_index]
    return pd.DataFrame(columns)


def _write_legs(
    writer: OutputWriter,
    result: ExplorationResult,
    model: CarModel,
    prefix: str,
) -> List[Path]:
    written = []
    for index, leg in enumerate(result.legs):
        meta = _metadata(
            "explore", model, leg=index, parameter=leg.parameter, grid={"dt": leg.desired.dt}
        )
        stem = f"{prefix}_leg{index:02d}"
        written.append(writer.write_frame(f"{stem}_desired.csv", leg.desired.to_frame(), meta))
        written.append(
            writer.write_frame(
                f"{stem}_optimal.csv", trajectory_report(model, leg.optimum), meta
            )
        )
        written.append(
            writer.write_jsonl(
                f"{stem}_iterates.jsonl",
                [record.as_dict() for record in leg.result.iterates],
                meta,
            )
        )
    return written


def _leg_summaries(result: ExplorationResult, model: CarModel) -> List[Dict[str, Any]]:
    rows = result.summary()
    for row, leg in zip(rows, result.legs):
        report = trajectory_report(model, leg.optimum)
        row["peak_abs_a_lat"] = float(report["a_lat"].abs().max())
    return rows


def _family(config: RunConfig, model: CarModel, run: Configuration) -> DesiredCurveFamily:
    cmd = config.explore
    dt = config.solver_settings().dt
    if cmd.external_curve:
        return DesiredCurveFamily.single(load_external_curve(cmd.external_curve, dt))
    track = load_track(cmd.track, cmd.waypoints, cmd.speed)
    return track_family(
        track, model, cmd.schedule, cmd.schedule_values, dt, cmd.tire_mode, run.threads
    )


@log_io
def run_explore(config: RunConfig, run: Configuration) -> List[Path]:
    """Quasi-static design, family generation and exploration.

    Completed legs are written before a leg failure is re-raised.
    """
    cmd = config.explore
    settings = config.solver_settings()
    external = bool(cmd.external_curve)
    model = car_model(config, kind=cmd.model, drive="all" if external else "rear")
    weights = _weights(config, external)
    family = _family(config, model, run)
    writer = _writer(config, run)

    try:
        result = explore(family, weights, model, settings)
    except ExplorationError as e:
        if e.result is not None:
            _write_legs(writer, e.result, model, "explore")
        logger.error(f"Exploration aborted at leg {e.leg}; completed legs were written")
        raise
    written = _write_legs(writer, result, model, "explore")

    bicycle_result = None
    if cmd.compare_bicycle:
        bicycle_model = model.with_kind("bicycle")
        try:
            bicycle_result = explore(family, weights, bicycle_model, settings)
        except ExplorationError as e:
            logger.error(f"Bicycle comparison failed: {e}")
            bicycle_result = e.result
        if bicycle_result is not None:
            written += _write_legs(writer, bicycle_result, bicycle_model, "explore_bicycle")

    target = family.target
    bicycle_final = (
        bicycle_result.final
        if bicycle_result is not None and len(bicycle_result.legs) == len(family)
        else None
    )
    written.append(
        writer.write_frame(
            "explore_comparison.csv",
            _comparison(target, result.final, bicycle_final),
            _metadata("explore", model, grid={"dt": target.dt}),
        )
    )

    baseline = initial_trajectory(target, weights, model)
    summary = {
        "kind": family.kind,
        "model": model.describe(),
        "weights": weights.describe(),
        "legs": _leg_summaries(result, model),
        "projection_position_rms": position_rms(baseline, target),
    }
    if bicycle_result is not None:
        summary["bicycle_legs"] = _leg_summaries(bicycle_result, model.with_kind("bicycle"))
    written.append(
        writer.write_json("explore_summary.json", summary, _metadata("explore", model))
    )
    return written


COMMANDS = {
    "tire": run_tire,
    "equilibria": run_equilibria,
    "simulate": run_simulate,
    "explore": run_explore,
}


def run_command(name: str, config: RunConfig, run: Configuration) -> List[Path]:
    if name not in COMMANDS:
        raise InvalidInputError(f"Unknown command {name}")
    try:
        return COMMANDS[name](config, run)
    except LtcarError as e:
        logger.error(f"Command {name} failed: {e}")
        raise
