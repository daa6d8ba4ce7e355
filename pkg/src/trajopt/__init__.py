# Copyright (c) 2025 Bytedance Ltd. and/or its affiliates
# SPDX-License-Identifier: MIT

from .integrate import (
    integrate,
    linearize,
    linearize_step,
    resample_inputs,
    rk4_step,
    step_hessians,
)
from .newton import (
    cost_gradient,
    descent_direction,
    directional_derivative,
    line_search,
    po_newton,
    tangent_from_inputs,
)
from .projection import cost, design_gain, project, quadrature_weights, riccati_sweep
from .report import retime, trajectory_report
from .types import (
    TRAJECTORY_COLUMNS,
    Curve,
    Dynamics,
    GainSchedule,
    IterateRecord,
    NewtonResult,
    StepJacobians,
    Trajectory,
    Weights,
)

__all__ = [
    "TRAJECTORY_COLUMNS",
    "Curve",
    "Trajectory",
    "Dynamics",
    "Weights",
    "GainSchedule",
    "StepJacobians",
    "IterateRecord",
    "NewtonResult",
    "rk4_step",
    "integrate",
    "linearize",
    "linearize_step",
    "step_hessians",
    "resample_inputs",
    "riccati_sweep",
    "design_gain",
    "project",
    "cost",
    "quadrature_weights",
    "tangent_from_inputs",
    "directional_derivative",
    "cost_gradient",
    "descent_direction",
    "line_search",
    "po_newton",
    "retime",
    "trajectory_report",
]
