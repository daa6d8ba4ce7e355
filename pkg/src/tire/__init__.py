# Copyright (c) 2025 Bytedance Ltd. and/or its affiliates
# SPDX-License-Identifier: MIT

from .pacejka import (
    combined,
    cornering_stiffness,
    force_envelope,
    linear_lateral,
    linear_longitudinal,
    longitudinal_stiffness,
    loss_lateral,
    loss_longitudinal,
    magic_formula,
    pure_lateral,
    pure_longitudinal,
    steered_frame,
    tire_coefficients,
)
from .types import FrictionPair, SlipState, TireMode, TireParams, TireSet

__all__ = [
    "TireParams",
    "TireSet",
    "TireMode",
    "SlipState",
    "FrictionPair",
    "magic_formula",
    "pure_longitudinal",
    "pure_lateral",
    "loss_longitudinal",
    "loss_lateral",
    "combined",
    "steered_frame",
    "cornering_stiffness",
    "longitudinal_stiffness",
    "linear_lateral",
    "linear_longitudinal",
    "tire_coefficients",
    "force_envelope",
]
