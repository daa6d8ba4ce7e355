# Copyright (c) 2025 Bytedance Ltd. and/or its affiliates
# SPDX-License-Identifier: MIT

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from pydantic import ValidationError

from src.utils.exceptions import InvalidInputError, NumericalError
from src.vehicle import CarModel

from .continuation import trace_branch
from .types import EquilibriumUnknowns, ManifoldBranch

logger = logging.getLogger(__name__)

ORIGIN = EquilibriumUnknowns(0.0, 0.0, 0.0, 0.0)


def understeer_gradient(
    branch: ManifoldBranch, a_lat_max: Optional[float] = None
) -> pd.Series:
    """K_us = d(delta)/d(a_lat) - (a+b)/v^2 sampled along the branch.

    Only the segment before the first fold is used, where a_lat is monotone.
    With ``a_lat_max`` the samples are further restricted to
    |a_lat| <= a_lat_max.

    Raises:
        InvalidInputError: the requested window reaches past the fold, or
            fewer than two samples remain
    """
    if not branch.points:
        raise InvalidInputError("Branch is empty")
    segment = branch.pre_fold()
    x = segment.unknowns()
    a_lat, delta = x[:, 0], x[:, 2]
    if a_lat_max is not None:
        if branch.fold_indices() and a_lat_max > np.max(np.abs(a_lat)):
            raise InvalidInputError(
                f"Window |a_lat| <= {a_lat_max} spans the fold at "
                f"{np.max(np.abs(a_lat)):.3f} m/s^2"
            )
        keep = np.abs(a_lat) <= a_lat_max
        a_lat, delta = a_lat[keep], delta[keep]
    if a_lat.size < 2:
        raise InvalidInputError("Need at least two samples for the gradient")
    if np.any(np.diff(a_lat) == 0.0) or not (
        np.all(np.diff(a_lat) > 0.0) or np.all(np.diff(a_lat) < 0.0)
    ):
        raise InvalidInputError("Lateral acceleration is not monotone on the window")
    if not np.isfinite(branch.wheelbase):
        raise InvalidInputError("Branch carries no wheelbase")
    k_a = branch.wheelbase / branch.v**2
    values = np.gradient(delta, a_lat) - k_a
    return pd.Series(values, index=pd.Index(a_lat, name="a_lat"), name="k_us")


def _trace(
    model: CarModel, v: float, label: Dict[str, Any], options: Dict[str, Any]
) -> List[ManifoldBranch]:
    branches = []
    orientations = (1, -1) if options.get("mirror") else (1,)
    trace_options = {k: val for k, val in options.items() if k != "mirror"}
    for orientation in orientations:
        branch = trace_branch(ORIGIN, v, model, orientation=orientation, **trace_options)
        branch.label = {**label, "orientation": orientation}
        branches.append(branch)
    return branches


def _run_all(tasks, threads: int) -> List[ManifoldBranch]:
    branches: List[ManifoldBranch] = []
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        futures = [(label, pool.submit(fn)) for label, fn in tasks]
        for label, future in futures:
            try:
                branches.extend(future.result())
            except (NumericalError, InvalidInputError) as e:
                logger.warning(f"Branch {label} failed: {e}")
    return branches


def trace_speeds(
    speeds: Sequence[float],
    model: CarModel,
    threads: int = 1,
    mirror: bool = False,
    **options: Any,
) -> List[ManifoldBranch]:
    """One branch from the straight-running equilibrium per speed.

    With ``mirror`` the negatively oriented branch is traced as well.
    Failures are logged and the remaining speeds still run.
    """
    options = {**options, "mirror": mirror}
    tasks = [
        (f"v={v}", lambda v=v: _trace(model, float(v), {"speed": float(v)}, options))
        for v in speeds
    ]
    return _run_all(tasks, threads)


def sweep_parameter(
    name: str,
    values: Sequence[float],
    v: float,
    model: CarModel,
    threads: int = 1,
    **options: Any,
) -> List[ManifoldBranch]:
    """Trace one branch per parameter value at fixed speed.

    ``b`` moves the center of mass along the unchanged wheelbase; any other
    name replaces the vehicle field of that name.
    """

    def variant(value: float) -> CarModel:
        if name == "b":
            vehicle = model.vehicle.with_com(value)
        elif name in type(model.vehicle).model_fields:
            try:
                vehicle = type(model.vehicle).model_validate(
                    {**model.vehicle.model_dump(), name: value}
                )
            except ValidationError as e:
                raise InvalidInputError(f"Invalid {name}={value}: {e}") from e
        else:
            raise InvalidInputError(f"Unknown vehicle parameter '{name}'")
        return replace(model, vehicle=vehicle)

    def task(value: float, label: Dict[str, Any]):
        return lambda: _trace(variant(value), float(v), label, options)

    tasks = []
    for value in values:
        label = {"param": name, "value": float(value), "speed": float(v)}
        tasks.append((f"{name}={value}", task(float(value), label)))
    return _run_all(tasks, threads)
