# Copyright (c) 2025 Bytedance Ltd. and/or its affiliates
# SPDX-License-Identifier: MIT

"""
Cornering-equilibrium equations.

At constant speed v, sideslip beta and yaw rate a_lat / v the body-frame
accelerations are a_x = -a_lat sin(beta) and a_y = a_lat cos(beta), and the
three dynamic rows read

    m a_x - m b psidot^2 + mu_fx f_fz + mu_rx f_rz = 0
    m a_y + mu_fy f_fz + mu_ry f_rz = 0
    m b a_y + (a + b) mu_fy f_fz = 0

with the loads of a steady turn substituted. The front slip is held at zero.
"""

import logging
from typing import Tuple

import numpy as np

from src.tire.types import FloatArray, Scalar
from src.utils.exceptions import IllPosedModelError, InvalidInputError
from src.vehicle import CarModel, VehicleParams, equilibrium_loads, static_loads

from .types import EquilibriumPoint, EquilibriumUnknowns

logger = logging.getLogger(__name__)

FD_STEP = 1e-6


def _as_unknowns(x) -> FloatArray:
    if isinstance(x, EquilibriumUnknowns):
        return x.as_array()
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != 4:
        raise InvalidInputError(f"Expected 4 unknowns, got shape {x.shape}")
    return x


def _equilibrium_state(x: FloatArray, v: float) -> Tuple[FloatArray, FloatArray]:
    a_lat, beta, delta, kappa_r = (x[..., i] for i in range(4))
    zeros = np.zeros_like(a_lat)
    state = np.stack(
        [zeros, zeros, zeros, v * np.cos(beta), v * np.sin(beta), a_lat / v], axis=-1
    )
    inputs = np.stack([delta, kappa_r, zeros], axis=-1)
    return state, inputs


def _loads(x: FloatArray, v: float, model: CarModel):
    if model.kind == "bicycle":
        return static_loads(model.vehicle)
    loads = equilibrium_loads(x[..., 0], x[..., 1], v, model.vehicle)
    if np.any(loads.front_load <= 0.0) or np.any(loads.rear_load <= 0.0):
        margin = float(np.min(np.minimum(loads.front_load, loads.rear_load)))
        raise IllPosedModelError(
            f"Steady-turn load vanishes, margin {margin:.3f} N", margin=margin
        )
    return loads


def _evaluate(x: FloatArray, v: float, model: CarModel):
    if v <= 0.0:
        raise InvalidInputError(f"Speed must be positive, got {v}")
    if np.any(x[..., 3] <= -1.0):
        raise InvalidInputError("kappa_r must be greater than -1")
    p = model.vehicle
    state, inputs = _equilibrium_state(x, v)
    mu = model.coefficients(state, inputs)
    loads = _loads(x, v, model)
    a_lat, beta = x[..., 0], x[..., 1]
    a_x = -a_lat * np.sin(beta)
    a_y = a_lat * np.cos(beta)
    psidot = a_lat / v
    rows = np.stack(
        [
            p.m * a_x - p.m * p.b * psidot**2 + mu.mu_fx * loads.ffz + mu.mu_rx * loads.frz,
            p.m * a_y + mu.mu_fy * loads.ffz + mu.mu_ry * loads.frz,
            p.m * p.b * a_y + p.wheelbase * mu.mu_fy * loads.ffz,
        ],
        axis=-1,
    )
    return rows, loads, mu, state, inputs


def residual(x, v: float, model: CarModel) -> FloatArray:
    """Equilibrium residual in N; broadcasts over leading dimensions of ``x``."""
    rows, *_ = _evaluate(_as_unknowns(x), v, model)
    return rows


def jacobian(x, v: float, model: CarModel, step: float = FD_STEP) -> FloatArray:
    """3x4 central finite-difference Jacobian of the residual.

    Component i is perturbed by ``step * max(1, |x_i|)``; all eight
    perturbed points are evaluated in one batched call.
    """
    x = _as_unknowns(x)
    h = step * np.maximum(1.0, np.abs(x))
    offsets = np.diag(h)
    batch = np.concatenate([x + offsets, x - offsets], axis=0)
    values = residual(batch, v, model)
    return ((values[:4] - values[4:]) / (2.0 * h[:, None])).T


def evaluate_point(x, v: float, model: CarModel) -> EquilibriumPoint:
    """Residual norm, loads and contact-point diagnostics of an unknown vector."""
    unknowns = x if isinstance(x, EquilibriumUnknowns) else EquilibriumUnknowns.from_array(x)
    rows, loads, mu, state, inputs = _evaluate(unknowns.as_array(), v, model)
    beta_r, beta_f = model.slips(state, inputs)
    return EquilibriumPoint(
        unknowns=unknowns,
        v=float(v),
        loads=loads,
        residual_norm=float(np.linalg.norm(rows)),
        beta_r=float(beta_r),
        beta_f=float(beta_f),
        mu_rx=float(mu.mu_rx),
    )


def ackermann_steer(a_lat: Scalar, v: Scalar, p: VehicleParams) -> Scalar:
    """Kinematic steer (a+b) a_lat / v^2 of a neutral car."""
    return p.wheelbase * np.asarray(a_lat) / np.square(v)


def ackermann_gradient(v: Scalar, p: VehicleParams) -> Scalar:
    return p.wheelbase / np.square(v)
