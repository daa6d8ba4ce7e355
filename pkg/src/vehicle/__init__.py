# Copyright (c) 2025 Bytedance Ltd. and/or its affiliates
# SPDX-License-Identifier: MIT

from .dynamics import (
    VX_MIN,
    CarModel,
    bicycle_dynamics,
    contact_slips,
    dynamics_vbeta,
    dynamics_vxvy,
    force_coefficients,
    full_dynamics,
    lateral_acceleration,
)
from .loads import (
    equilibrium_loads,
    normal_loads,
    static_loads,
    stoppie_threshold,
    well_posed,
    wheelie_threshold,
)
from .types import (
    INPUT_NAMES,
    STATE_NAMES,
    BodyCoefficients,
    CarInput,
    CarState,
    NormalLoads,
    VehicleParams,
    WellPosedness,
)

__all__ = [
    "VX_MIN",
    "STATE_NAMES",
    "INPUT_NAMES",
    "VehicleParams",
    "CarState",
    "CarInput",
    "NormalLoads",
    "BodyCoefficients",
    "WellPosedness",
    "CarModel",
    "normal_loads",
    "well_posed",
    "static_loads",
    "equilibrium_loads",
    "wheelie_threshold",
    "stoppie_threshold",
    "contact_slips",
    "force_coefficients",
    "dynamics_vxvy",
    "dynamics_vbeta",
    "full_dynamics",
    "bicycle_dynamics",
    "lateral_acceleration",
]
