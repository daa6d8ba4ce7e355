# Copyright (c) 2025 Bytedance Ltd. and/or its affiliates
# SPDX-License-Identifier: MIT

"""
Equations of motion of the single-track car with longitudinal load transfer.

The body-frame accelerations and the two normal forces are the solution of a
5x5 linear system, written either in (vx, vy) or in (v, beta). States are
expressed at the rear contact point. Every function broadcasts over leading
array dimensions so a whole trajectory can be evaluated at once.
"""

import logging
from dataclasses import dataclass, replace
from typing import Literal, Tuple

import numpy as np

from src.tire import FrictionPair, SlipState, TireSet, steered_frame, tire_coefficients
from src.tire.types import FloatArray, Scalar
from src.utils.exceptions import DegenerateSpeedError, IllPosedModelError

from .loads import static_loads, well_posed
from .types import (
    BodyCoefficients,
    CarInput,
    CarState,
    NormalLoads,
    VehicleParams,
)

logger = logging.getLogger(__name__)

VX_MIN = 0.5
COND_LIMIT = 1e12

ModelKind = Literal["ltcar", "bicycle"]
Drive = Literal["rear", "all"]


def _slip_angles(vx, vy, psidot, delta, p: VehicleParams, vx_min: float):
    vx = np.asarray(vx, dtype=np.float64)
    if np.any(vx <= vx_min):
        raise DegenerateSpeedError(
            f"vx = {float(np.min(vx)):.4f} m/s is at or below the floor {vx_min} m/s"
        )
    beta_r = np.arctan(vy / vx)
    beta_f = np.arctan((vy + p.wheelbase * np.asarray(psidot)) / vx) - delta
    return beta_r, beta_f


def contact_slips(
    s: CarState, u: CarInput, p: VehicleParams, vx_min: float = VX_MIN
) -> Tuple[SlipState, SlipState]:
    """Rear and front contact-point slips; the front angle is in the tire frame."""
    beta_r, beta_f = _slip_angles(s.vx, s.vy, s.psidot, u.delta, p, vx_min)
    rear = SlipState(kappa=u.kappa_r, beta=_plain(beta_r))
    front = SlipState(kappa=u.kappa_f, beta=_plain(beta_f), delta=u.delta)
    return rear, front


def _plain(value):
    return float(value) if np.ndim(value) == 0 else value


def _coefficients(vx, vy, psidot, delta, kappa_r, kappa_f, p, tires, vx_min):
    beta_r, beta_f = _slip_angles(vx, vy, psidot, delta, p, vx_min)
    rear = tire_coefficients(
        SlipState(kappa=kappa_r, beta=beta_r),
        tires.rear,
        tires.mode,
        tires.lateral_stiffness("rear"),
        tires.longitudinal_stiffness("rear"),
    )
    front = tire_coefficients(
        SlipState(kappa=kappa_f, beta=beta_f, delta=delta),
        tires.front,
        tires.mode,
        tires.lateral_stiffness("front"),
        tires.longitudinal_stiffness("front"),
    )
    # lateral force opposes the contact-point sideslip
    front_body = steered_frame(FrictionPair(front.mu_x, -np.asarray(front.mu_y)), delta)
    return BodyCoefficients(
        mu_fx=np.asarray(front_body.mu_x),
        mu_fy=np.asarray(front_body.mu_y),
        mu_rx=np.asarray(rear.mu_x),
        mu_ry=-np.asarray(rear.mu_y),
    )


def force_coefficients(
    s: CarState, u: CarInput, p: VehicleParams, tires: TireSet, vx_min: float = VX_MIN
) -> BodyCoefficients:
    """Body-frame coefficients (mu_fx, mu_fy, mu_rx, mu_ry) at a state and input."""
    return _coefficients(
        s.vx, s.vy, s.psidot, u.delta, u.kappa_r, u.kappa_f, p, tires, vx_min
    )


def _check_loads(mu: BodyCoefficients, psidot, p: VehicleParams) -> None:
    check = well_posed(mu.mu_fx, mu.mu_rx, psidot, p)
    if not check:
        raise IllPosedModelError(
            f"Load-transfer model is ill-posed, margin {check.margin:.3f} N",
            margin=check.margin,
        )


def _solve(matrix: FloatArray, rhs: FloatArray) -> FloatArray:
    cond = np.linalg.cond(matrix)
    if np.any(~np.isfinite(cond)) or np.any(cond > COND_LIMIT):
        raise IllPosedModelError(
            f"Constrained system is singular (condition {float(np.max(cond)):.3e})"
        )
    return np.linalg.solve(matrix, rhs[..., None])[..., 0]


def _system_vxvy(vx, vy, psidot, mu: BodyCoefficients, p: VehicleParams):
    m, b, h, L = p.m, p.b, p.h, p.wheelbase
    shape = np.broadcast(vx, vy, psidot, mu.mu_fx, mu.mu_fy, mu.mu_rx, mu.mu_ry).shape
    matrix = np.zeros(shape + (5, 5))
    matrix[..., 0, 0] = m
    matrix[..., 0, 3] = mu.mu_fx
    matrix[..., 0, 4] = mu.mu_rx
    matrix[..., 1, 1] = m
    matrix[..., 1, 2] = m * b
    matrix[..., 1, 3] = mu.mu_fy
    matrix[..., 1, 4] = mu.mu_ry
    matrix[..., 2, 1] = m * b
    matrix[..., 2, 2] = p.I_zz + m * b**2
    matrix[..., 2, 3] = L * mu.mu_fy
    matrix[..., 3, 3] = -1.0
    matrix[..., 3, 4] = -1.0
    matrix[..., 4, 0] = -m * h
    matrix[..., 4, 3] = L

    wz2 = np.square(psidot)
    coriolis = np.zeros(shape + (5,))
    coriolis[..., 0] = -m * b * wz2 - m * vy * psidot
    coriolis[..., 1] = m * vx * psidot
    coriolis[..., 2] = m * b * vx * psidot
    coriolis[..., 4] = (p.I_xz + m * h * b) * wz2 + m * h * vy * psidot
    gravity = np.array([0.0, 0.0, 0.0, -p.weight, p.weight * b])
    return matrix, -(coriolis + gravity)


def _system_vbeta(v, beta, psidot, mu: BodyCoefficients, p: VehicleParams):
    m, b, h, L = p.m, p.b, p.h, p.wheelbase
    cb, sb = np.cos(beta), np.sin(beta)
    shape = np.broadcast(v, beta, psidot, mu.mu_fx, mu.mu_fy, mu.mu_rx, mu.mu_ry).shape
    matrix = np.zeros(shape + (5, 5))
    matrix[..., 0, 0] = m * cb
    matrix[..., 0, 1] = -m * v * sb
    matrix[..., 0, 3] = mu.mu_fx
    matrix[..., 0, 4] = mu.mu_rx
    matrix[..., 1, 0] = m * sb
    matrix[..., 1, 1] = m * v * cb
    matrix[..., 1, 2] = m * b
    matrix[..., 1, 3] = mu.mu_fy
    matrix[..., 1, 4] = mu.mu_ry
    matrix[..., 2, 0] = m * b * sb
    matrix[..., 2, 1] = m * b * v * cb
    matrix[..., 2, 2] = p.I_zz + m * b**2
    matrix[..., 2, 3] = L * mu.mu_fy
    matrix[..., 3, 3] = -1.0
    matrix[..., 3, 4] = -1.0
    matrix[..., 4, 0] = -m * h * cb
    matrix[..., 4, 1] = m * h * v * sb
    matrix[..., 4, 3] = L

    wz2 = np.square(psidot)
    coriolis = np.zeros(shape + (5,))
    coriolis[..., 0] = -m * v * psidot * sb - m * b * wz2
    coriolis[..., 1] = m * v * psidot * cb
    coriolis[..., 2] = m * b * v * psidot * cb
    coriolis[..., 4] = (p.I_xz + m * h * b) * wz2 + m * h * v * psidot * sb
    gravity = np.array([0.0, 0.0, 0.0, -p.weight, p.weight * b])
    return matrix, -(coriolis + gravity)


def _loads(z: FloatArray) -> NormalLoads:
    if z.ndim == 1:
        return NormalLoads(ffz=float(z[3]), frz=float(z[4]))
    return NormalLoads(ffz=z[..., 3], frz=z[..., 4])


def _ltcar_body(vx, vy, psidot, mu: BodyCoefficients, p: VehicleParams):
    _check_loads(mu, psidot, p)
    z = _solve(*_system_vxvy(vx, vy, psidot, mu, p))
    return z[..., :3], _loads(z)


def _bicycle_body(vx, vy, psidot, mu: BodyCoefficients, p: VehicleParams):
    m, b, L = p.m, p.b, p.wheelbase
    loads = static_loads(p)
    ffz, frz = loads.ffz, loads.frz
    vx_dot = (
        -mu.mu_fx * ffz - mu.mu_rx * frz + m * b * psidot**2 + m * vy * psidot
    ) / m
    r1 = -mu.mu_fy * ffz - mu.mu_ry * frz - m * vx * psidot
    r2 = -L * mu.mu_fy * ffz - m * b * vx * psidot
    # inverse of [[m, m b], [m b, I_zz + m b^2]], determinant m I_zz
    vy_dot = ((p.I_zz + m * b**2) * r1 - m * b * r2) / (m * p.I_zz)
    psi_ddot = (r2 - b * r1) / p.I_zz
    derivs = np.stack(np.broadcast_arrays(vx_dot, vy_dot, psi_ddot), axis=-1)
    shape = derivs.shape[:-1]
    return derivs, NormalLoads(
        ffz=ffz if not shape else np.full(shape, ffz),
        frz=frz if not shape else np.full(shape, frz),
    )


def dynamics_vxvy(
    s: CarState, u: CarInput, p: VehicleParams, tires: TireSet, vx_min: float = VX_MIN
) -> Tuple[FloatArray, NormalLoads]:
    """Derivatives of (vx, vy, psidot) and the normal loads."""
    mu = force_coefficients(s, u, p, tires, vx_min)
    return _ltcar_body(s.vx, s.vy, s.psidot, mu, p)


def dynamics_vbeta(
    s: CarState, u: CarInput, p: VehicleParams, tires: TireSet, vx_min: float = VX_MIN
) -> Tuple[FloatArray, NormalLoads]:
    """Derivatives of (v, beta, psidot) from the system written in (v, beta)."""
    mu = force_coefficients(s, u, p, tires, vx_min)
    _check_loads(mu, s.psidot, p)
    z = _solve(*_system_vbeta(s.v, s.beta, s.psidot, mu, p))
    return z[..., :3], _loads(z)


def _kinematics(psi, vx, vy, psidot):
    cos_p, sin_p = np.cos(psi), np.sin(psi)
    return vx * cos_p - vy * sin_p, vx * sin_p + vy * cos_p, psidot


def full_dynamics(
    s: CarState, u: CarInput, p: VehicleParams, tires: TireSet, vx_min: float = VX_MIN
) -> FloatArray:
    """Derivative of the six-state vector (x, y, psi, vx, vy, psidot)."""
    derivs, _ = dynamics_vxvy(s, u, p, tires, vx_min)
    return _assemble(s.psi, s.vx, s.vy, s.psidot, derivs)


def bicycle_dynamics(
    s: CarState, u: CarInput, p: VehicleParams, tires: TireSet, vx_min: float = VX_MIN
) -> FloatArray:
    """Six-state derivative with normal loads frozen at the static split."""
    mu = force_coefficients(s, u, p, tires, vx_min)
    derivs, _ = _bicycle_body(s.vx, s.vy, s.psidot, mu, p)
    return _assemble(s.psi, s.vx, s.vy, s.psidot, derivs)


def _assemble(psi, vx, vy, psidot, derivs: FloatArray) -> FloatArray:
    x_dot, y_dot, psi_dot = _kinematics(psi, vx, vy, psidot)
    kinematic = np.stack(np.broadcast_arrays(x_dot, y_dot, psi_dot), axis=-1)
    return np.concatenate([kinematic, derivs], axis=-1)


def lateral_acceleration(state: FloatArray, derivative: FloatArray) -> FloatArray:
    """Acceleration normal to the velocity, v * chi_dot, from state samples."""
    vx, vy, psidot = state[..., 3], state[..., 4], state[..., 5]
    a_x = derivative[..., 3] - vy * psidot
    a_y = derivative[..., 4] + vx * psidot
    return (vx * a_y - vy * a_x) / np.hypot(vx, vy)


@dataclass(frozen=True)
class CarModel:
    """A vehicle, its tires and the model variant, evaluated on raw arrays.

    ``x`` has trailing dimension 6 (x, y, psi, vx, vy, psidot) and ``u``
    trailing dimension 3 (delta, kappa_r, kappa_f). With ``drive="rear"`` the
    front slip input is ignored and held at zero.
    """

    vehicle: VehicleParams
    tires: TireSet
    kind: ModelKind = "ltcar"
    drive: Drive = "all"
    vx_min: float = VX_MIN

    def coefficients(self, x: FloatArray, u: FloatArray) -> BodyCoefficients:
        kappa_f = 0.0 if self.drive == "rear" else u[..., 2]
        return _coefficients(
            x[..., 3],
            x[..., 4],
            x[..., 5],
            u[..., 0],
            u[..., 1],
            kappa_f,
            self.vehicle,
            self.tires,
            self.vx_min,
        )

    def body(self, x: FloatArray, u: FloatArray) -> Tuple[FloatArray, NormalLoads]:
        x = np.asarray(x, dtype=np.float64)
        u = np.asarray(u, dtype=np.float64)
        mu = self.coefficients(x, u)
        if self.kind == "bicycle":
            return _bicycle_body(x[..., 3], x[..., 4], x[..., 5], mu, self.vehicle)
        return _ltcar_body(x[..., 3], x[..., 4], x[..., 5], mu, self.vehicle)

    def rhs(self, x: FloatArray, u: FloatArray) -> FloatArray:
        x = np.asarray(x, dtype=np.float64)
        derivs, _ = self.body(x, u)
        return _assemble(x[..., 2], x[..., 3], x[..., 4], x[..., 5], derivs)

    def loads(self, x: FloatArray, u: FloatArray) -> NormalLoads:
        return self.body(x, u)[1]

    def slips(self, x: FloatArray, u: FloatArray) -> Tuple[FloatArray, FloatArray]:
        return _slip_angles(
            x[..., 3], x[..., 4], x[..., 5], u[..., 0], self.vehicle, self.vx_min
        )

    def with_kind(self, kind: ModelKind) -> "CarModel":
        return replace(self, kind=kind)

    def with_tires(self, tires: TireSet) -> "CarModel":
        return replace(self, tires=tires)

    def describe(self) -> dict:
        return {
            "kind": self.kind,
            "drive": self.drive,
            "tire_mode": self.tires.mode,
            "vx_min": self.vx_min,
            "vehicle": self.vehicle.model_dump(),
            "tires": self.tires.model_dump(),
        }
