# Copyright (c) 2025 Bytedance Ltd. and/or its affiliates
# SPDX-License-Identifier: MIT

"""
Continuation over a family of desired curves.

The first leg starts from the projection of the first desired curve; every
later leg is warm-started from the optimum of the leg before it, retimed
when the durations differ.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from src.config.configuration import SolverSettings
from src.trajopt import (
    Curve,
    Dynamics,
    NewtonResult,
    Trajectory,
    Weights,
    cost,
    design_gain,
    po_newton,
    project,
    retime,
)
from src.utils.exceptions import ExplorationError, InvalidInputError, NumericalError
from src.vehicle.types import INPUT_NAMES, STATE_NAMES

from .family import DesiredCurveFamily

logger = logging.getLogger(__name__)

# light weight on inputs of curves whose inputs are unknown
EXTERNAL_INPUT_WEIGHT = 1e-3


@dataclass
class LegResult:
    parameter: float
    desired: Curve
    initial: Trajectory
    result: NewtonResult

    @property
    def optimum(self) -> Trajectory:
        return self.result.trajectory

    def summary(self) -> Dict[str, Any]:
        costs = self.result.costs
        return {
            "parameter": self.parameter,
            "status": self.result.status,
            "iterations": len(costs) - 1,
            "initial_cost": costs[0],
            "final_cost": costs[-1],
            "tire_mode": getattr(self.desired, "tire_mode", None),
            "position_rms": position_rms(self.optimum, self.desired),
        }


@dataclass
class ExplorationResult:
    """Per-leg optima of an exploration; the last one is the answer."""

    kind: str
    legs: List[LegResult] = field(default_factory=list)

    @property
    def final(self) -> Trajectory:
        if not self.legs:
            raise InvalidInputError("Exploration has no completed legs")
        return self.legs[-1].optimum

    @property
    def optima(self) -> List[Trajectory]:
        return [leg.optimum for leg in self.legs]

    def summary(self) -> List[Dict[str, Any]]:
        return [leg.summary() for leg in self.legs]


def position_rms(traj: Curve, curve: Curve) -> float:
    """Root-mean-square planar distance between two curves on one grid."""
    d = traj.states[:, :2] - curve.states[:, :2]
    return float(np.sqrt(np.mean(np.sum(d**2, axis=1))))


def initial_trajectory(xi_d: Curve, weights: Weights, model: Dynamics) -> Trajectory:
    """Projection of a desired curve with a gain designed along it."""
    return project(xi_d, design_gain(xi_d, weights, model), model)


def _warm_start(
    previous: Trajectory, xi_d: Curve, weights: Weights, model: Dynamics
) -> Trajectory:
    if previous.same_grid(xi_d):
        return previous
    guess = retime(previous, xi_d.times)
    try:
        return project(guess, design_gain(guess, weights, model), model)
    except NumericalError as e:
        logger.warning(f"Retimed warm start failed ({e}); projecting the desired curve")
        return initial_trajectory(xi_d, weights, model)


def explore(
    family: DesiredCurveFamily,
    weights: Weights,
    model: Dynamics,
    settings: Optional[SolverSettings] = None,
) -> ExplorationResult:
    """Run PO-Newton on every family member in order, warm-starting each leg.

    Args:
        family: desired curves ordered by continuation parameter
        weights: cost and regulator weights
        model: dynamics with an ``rhs(x, u)`` method
        settings: PO-Newton tolerances; defaults when omitted

    Returns:
        ExplorationResult with one LegResult per family member

    Raises:
        ExplorationError: a leg failed; ``result`` holds the completed legs
            and ``leg`` the index of the failing one
    """
    settings = settings or SolverSettings()
    if len(family) == 0:
        raise InvalidInputError("Cannot explore an empty family")
    result = ExplorationResult(kind=family.kind)
    for index, (parameter, xi_d) in enumerate(family):
        try:
            if result.legs:
                start = _warm_start(result.legs[-1].optimum, xi_d, weights, model)
            else:
                start = initial_trajectory(xi_d, weights, model)
            outcome = po_newton(
                start,
                xi_d,
                weights,
                model,
                grad_tol=settings.grad_tol,
                max_iter=settings.max_iter,
                sigma=settings.armijo_sigma,
                max_backtracks=settings.max_backtracks,
                mode=settings.newton_mode,
            )
        except (NumericalError, InvalidInputError) as e:
            raise ExplorationError(
                f"Leg {index} (parameter {parameter}) failed: {e}",
                result=result,
                leg=index,
            ) from e
        result.legs.append(LegResult(parameter, xi_d, start, outcome))
        logger.info(
            f"Leg {index} (parameter {parameter}): {outcome.status}, "
            f"cost {outcome.costs[0]:.6e} -> {outcome.cost:.6e}"
        )
    return result


def projection_cost(xi_d: Curve, weights: Weights, model: Dynamics) -> float:
    """Cost of the bare projection, the baseline an optimum must improve on."""
    return cost(initial_trajectory(xi_d, weights, model), xi_d, weights)


def _uniform(times: np.ndarray) -> bool:
    steps = np.diff(times)
    return bool(np.allclose(steps, steps[0], rtol=1e-9, atol=0.0))


def load_external_curve(path: str | Path, dt: Optional[float] = None) -> Curve:
    """Read a desired curve written in the trajectory table format.

    Missing input columns are filled with zeros. The curve is resampled by
    linear interpolation onto a grid of step ``dt`` starting at the first
    time; a uniform file is kept as is when ``dt`` is omitted or matches.

    Raises:
        InvalidInputError: the file cannot be parsed, misses state columns
            or its time column is not strictly increasing
    """
    try:
        frame = pd.read_csv(path)
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise InvalidInputError(f"Cannot read curve file {path}: {e}") from e
    required = ["t", *STATE_NAMES]
    missing = [c for c in required if c not in frame.columns]
    if missing:
        raise InvalidInputError(f"Curve file {path} misses columns {missing}")
    columns = required + [c for c in INPUT_NAMES if c in frame.columns]
    try:
        frame = frame[columns].astype(np.float64)
    except ValueError as e:
        raise InvalidInputError(f"Curve file {path} has non-numeric values: {e}") from e
    times = frame["t"].to_numpy()
    if times.size < 2 or np.any(np.diff(times) <= 0.0):
        raise InvalidInputError(f"Time column of {path} is not strictly increasing")
    file_dt = float(times[1] - times[0])
    if _uniform(times) and (dt is None or abs(dt - file_dt) <= 1e-9 * file_dt):
        return Curve.from_frame(frame)
    step = file_dt if dt is None else dt
    if step <= 0.0:
        raise InvalidInputError(f"Step must be positive, got {step}")
    count = int(np.floor((times[-1] - times[0]) / step + 1e-9)) + 1
    grid = times[0] + step * np.arange(count)
    resampled = pd.DataFrame({c: np.interp(grid, times, frame[c]) for c in columns})
    resampled["t"] = grid
    logger.info(f"Resampled {path} from {times.size} to {count} samples (dt={step})")
    return Curve.from_frame(resampled)
