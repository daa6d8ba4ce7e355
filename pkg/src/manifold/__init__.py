# Copyright (c) 2025 Bytedance Ltd. and/or its affiliates
# SPDX-License-Identifier: MIT

from .analysis import ORIGIN, sweep_parameter, trace_speeds, understeer_gradient
from .continuation import newton_correct, solve_point, tangent, trace_branch
from .residual import (
    ackermann_gradient,
    ackermann_steer,
    evaluate_point,
    jacobian,
    residual,
)
from .types import (
    BRANCH_COLUMNS,
    UNKNOWN_NAMES,
    EquilibriumPoint,
    EquilibriumUnknowns,
    ManifoldBranch,
)

__all__ = [
    "ORIGIN",
    "BRANCH_COLUMNS",
    "UNKNOWN_NAMES",
    "EquilibriumPoint",
    "EquilibriumUnknowns",
    "ManifoldBranch",
    "residual",
    "jacobian",
    "evaluate_point",
    "ackermann_steer",
    "ackermann_gradient",
    "tangent",
    "newton_correct",
    "trace_branch",
    "solve_point",
    "understeer_gradient",
    "sweep_parameter",
    "trace_speeds",
]
