# Copyright (c) 2025 Bytedance Ltd. and/or its affiliates
# SPDX-License-Identifier: MIT

import numpy as np
import pandas as pd

from src.tire.types import FloatArray
from src.utils.exceptions import InvalidInputError
from src.vehicle import CarModel, lateral_acceleration

from .types import Curve

# body velocities scale with the inverse of the duration
_VELOCITY_COLUMNS = (3, 4, 5)


def retime(curve: Curve, times: FloatArray) -> Curve:
    """Resample ``curve`` on a new uniform grid by normalized time.

    Positions, heading and inputs are interpolated at t / T; velocities are
    multiplied by T_old / T_new so the path is traversed consistently.
    """
    times = np.asarray(times, dtype=np.float64)
    if times.ndim != 1 or times.size < 2:
        raise InvalidInputError("Need at least two target times")
    tau_old = (curve.times - curve.times[0]) / curve.duration
    tau_new = (times - times[0]) / (times[-1] - times[0])
    states = np.column_stack([np.interp(tau_new, tau_old, col) for col in curve.states.T])
    inputs = np.column_stack([np.interp(tau_new, tau_old, col) for col in curve.inputs.T])
    ratio = curve.duration / (times[-1] - times[0])
    for j in _VELOCITY_COLUMNS:
        if j < states.shape[1]:
            states[:, j] *= ratio
    return Curve(times, states, inputs)


def trajectory_report(model: CarModel, traj: Curve) -> pd.DataFrame:
    """Per-sample loads, slips and lateral acceleration of a car trajectory."""
    frame = traj.to_frame()
    derivative = model.rhs(traj.states, traj.inputs)
    loads = model.loads(traj.states, traj.inputs)
    beta_r, beta_f = model.slips(traj.states, traj.inputs)
    frame["ffz"] = loads.ffz
    frame["frz"] = loads.frz
    frame["load_sum"] = loads.total
    frame["beta_r"] = beta_r
    frame["beta_f"] = beta_f
    frame["a_lat"] = lateral_acceleration(traj.states, derivative)
    return frame
