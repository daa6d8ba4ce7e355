# Copyright (c) 2025 Bytedance Ltd. and/or its affiliates
# SPDX-License-Identifier: MIT

from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.tire.types import FloatArray, Scalar
from src.utils.exceptions import InvalidInputError

STATE_NAMES = ("x", "y", "psi", "vx", "vy", "psidot")
INPUT_NAMES = ("delta", "kappa_r", "kappa_f")


def _stack(obj, names) -> FloatArray:
    parts = [np.asarray(getattr(obj, n), dtype=np.float64) for n in names]
    return np.stack(np.broadcast_arrays(*parts), axis=-1)


class VehicleParams(BaseModel):
    """Inertial and geometric constants of the single-track car.

    ``b`` is measured from the rear contact point to the center of mass and
    ``a`` from the center of mass to the front contact point. ``I_yy`` is
    kept so parameter files stay complete; the reduced equations do not use
    it.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    m: float = Field(..., gt=0, description="Mass [kg]")
    a: float = Field(..., gt=0, description="CoM to front contact [m]")
    b: float = Field(..., gt=0, description="Rear contact to CoM [m]")
    h: float = Field(..., ge=0, description="CoM height [m]")
    I_zz: float = Field(..., gt=0, description="Yaw inertia [kg m^2]")
    I_xz: float = Field(0.0, description="Cross inertia [kg m^2]")
    I_yy: float = Field(0.0, ge=0, description="Pitch inertia [kg m^2]")
    g: float = Field(9.81, gt=0, description="Gravity [m/s^2]")

    @property
    def wheelbase(self) -> float:
        return self.a + self.b

    @property
    def weight(self) -> float:
        return self.m * self.g

    def with_com(self, b: float) -> "VehicleParams":
        """Move the center of mass keeping the wheelbase."""
        wheelbase = self.wheelbase
        if not 0.0 < b < wheelbase:
            raise InvalidInputError(
                f"b must lie inside the wheelbase (0, {wheelbase}), got {b}"
            )
        return self.model_copy(update={"a": wheelbase - b, "b": b})


@dataclass(frozen=True)
class CarState:
    """Pose of the rear contact point and body-frame velocities."""

    x: Scalar
    y: Scalar
    psi: Scalar
    vx: Scalar
    vy: Scalar
    psidot: Scalar

    def __post_init__(self):
        if not np.all(np.isfinite(self.as_array())):
            raise InvalidInputError("Car state must be finite")

    @property
    def v(self) -> Scalar:
        return np.hypot(self.vx, self.vy)

    @property
    def beta(self) -> Scalar:
        if np.any(np.asarray(self.vx) == 0.0):
            raise InvalidInputError("Sideslip view needs a nonzero vx")
        return np.arctan(np.divide(self.vy, self.vx))

    @property
    def chi(self) -> Scalar:
        return self.psi + self.beta

    def as_array(self) -> FloatArray:
        return _stack(self, STATE_NAMES)

    @classmethod
    def from_array(cls, values: FloatArray) -> "CarState":
        values = np.asarray(values, dtype=np.float64)
        if values.shape[-1] != 6:
            raise InvalidInputError(f"State needs 6 components, got {values.shape}")
        parts = [values[..., i] for i in range(6)]
        if values.ndim == 1:
            parts = [float(p) for p in parts]
        return cls(*parts)

    @classmethod
    def from_speed_sideslip(
        cls, v: Scalar, beta: Scalar, psidot: Scalar, x=0.0, y=0.0, psi=0.0
    ) -> "CarState":
        return cls(
            x=x,
            y=y,
            psi=psi,
            vx=v * np.cos(beta),
            vy=v * np.sin(beta),
            psidot=psidot,
        )


@dataclass(frozen=True)
class CarInput:
    """Steer angle and the two longitudinal slips."""

    delta: Scalar
    kappa_r: Scalar
    kappa_f: Scalar = 0.0

    def __post_init__(self):
        if not np.all(np.isfinite(self.as_array())):
            raise InvalidInputError("Car input must be finite")
        if np.any(np.asarray(self.kappa_r) <= -1.0) or np.any(
            np.asarray(self.kappa_f) <= -1.0
        ):
            raise InvalidInputError("Longitudinal slips must be greater than -1")

    def as_array(self) -> FloatArray:
        return _stack(self, INPUT_NAMES)

    @classmethod
    def from_array(cls, values: FloatArray) -> "CarInput":
        values = np.asarray(values, dtype=np.float64)
        if values.shape[-1] != 3:
            raise InvalidInputError(f"Input needs 3 components, got {values.shape}")
        parts = [values[..., i] for i in range(3)]
        if values.ndim == 1:
            parts = [float(p) for p in parts]
        return cls(*parts)


@dataclass(frozen=True)
class NormalLoads:
    """Signed normal forces in the z-down frame (both negative when valid)."""

    ffz: Scalar
    frz: Scalar

    @property
    def front_load(self) -> Scalar:
        return -self.ffz

    @property
    def rear_load(self) -> Scalar:
        return -self.frz

    @property
    def total(self) -> Scalar:
        return -(self.ffz + self.frz)


@dataclass(frozen=True)
class BodyCoefficients:
    """Body-frame force coefficients of both contact points."""

    mu_fx: Scalar
    mu_fy: Scalar
    mu_rx: Scalar
    mu_ry: Scalar


@dataclass(frozen=True)
class WellPosedness:
    ok: bool
    margin: float

    def __bool__(self) -> bool:
        return self.ok
