# Copyright (c) 2025 Bytedance Ltd. and/or its affiliates
# SPDX-License-Identifier: MIT

from dataclasses import dataclass
from typing import Literal, Optional, TypeAlias

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field

from src.utils.exceptions import InvalidInputError

FloatArray: TypeAlias = npt.NDArray[np.float64]
Scalar: TypeAlias = float | FloatArray

TireMode = Literal["pacejka", "linear"]
Axle = Literal["front", "rear"]


class TireParams(BaseModel):
    """Magic-formula coefficients of one axle plus its combined-slip losses."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    d_x: float = Field(..., gt=0, description="Longitudinal peak factor")
    c_x: float = Field(..., gt=0, description="Longitudinal shape factor")
    b_x: float = Field(..., gt=0, description="Longitudinal stiffness factor")
    e_x: float = Field(..., description="Longitudinal curvature factor")
    d_y: float = Field(..., gt=0, description="Lateral peak factor")
    c_y: float = Field(..., gt=0, description="Lateral shape factor")
    b_y: float = Field(..., gt=0, description="Lateral stiffness factor")
    e_y: float = Field(..., description="Lateral curvature factor")
    c_xb: float = Field(..., description="Shape of the longitudinal loss")
    r_bx1: float = Field(..., ge=0, description="Longitudinal loss gain")
    r_bx2: float = Field(..., ge=0, description="Longitudinal loss attenuation")
    c_yk: float = Field(..., description="Shape of the lateral loss")
    r_by1: float = Field(..., ge=0, description="Lateral loss gain")
    r_by2: float = Field(..., ge=0, description="Lateral loss attenuation")


class TireSet(BaseModel):
    """Front and rear tire parameters with the tire model in use.

    In ``linear`` mode the lateral and longitudinal coefficients are the
    stiffness times the slip; stiffnesses default to the magic-formula slope
    at zero slip.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    front: TireParams
    rear: TireParams
    mode: TireMode = "pacejka"
    front_lateral_stiffness: Optional[float] = Field(None, gt=0)
    rear_lateral_stiffness: Optional[float] = Field(None, gt=0)
    front_longitudinal_stiffness: Optional[float] = Field(None, gt=0)
    rear_longitudinal_stiffness: Optional[float] = Field(None, gt=0)

    def axle(self, which: Axle) -> TireParams:
        return self.front if which == "front" else self.rear

    def lateral_stiffness(self, which: Axle) -> float:
        override = getattr(self, f"{which}_lateral_stiffness")
        if override is not None:
            return override
        p = self.axle(which)
        return p.d_y * p.c_y * p.b_y

    def longitudinal_stiffness(self, which: Axle) -> float:
        override = getattr(self, f"{which}_longitudinal_stiffness")
        if override is not None:
            return override
        p = self.axle(which)
        return p.d_x * p.c_x * p.b_x

    def with_mode(self, mode: TireMode) -> "TireSet":
        return self.model_copy(update={"mode": mode})


@dataclass(frozen=True)
class SlipState:
    """Slip of one contact point; ``delta`` is zero at the rear."""

    kappa: Scalar
    beta: Scalar
    delta: Scalar = 0.0

    def __post_init__(self):
        for name in ("kappa", "beta", "delta"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise InvalidInputError(f"Slip component {name} must be finite")
        if np.any(np.asarray(self.kappa) <= -1.0):
            raise InvalidInputError("Longitudinal slip must be greater than -1")


@dataclass(frozen=True)
class FrictionPair:
    """Longitudinal and lateral force coefficients of one contact point."""

    mu_x: Scalar
    mu_y: Scalar

    @property
    def norm(self) -> Scalar:
        return np.hypot(self.mu_x, self.mu_y)
