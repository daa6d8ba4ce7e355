# Copyright (c) 2025 Bytedance Ltd. and/or its affiliates
# SPDX-License-Identifier: MIT

from dataclasses import dataclass, field
from typing import Any, Dict, List, Literal, Optional

import numpy as np
import pandas as pd

from src.tire.types import FloatArray
from src.utils.exceptions import InvalidInputError
from src.vehicle.types import CarInput, CarState, NormalLoads

UNKNOWN_NAMES = ("a_lat", "beta", "delta", "kappa_r")

BRANCH_COLUMNS = [
    "index",
    "arclength",
    "v",
    "a_lat",
    "beta",
    "beta_r",
    "beta_f",
    "delta",
    "kappa_r",
    "mu_rx",
    "ffz",
    "frz",
    "residual_norm",
]

StopReason = Literal["max_points", "singular", "ill_posed", "delta_limit", "step_size"]


@dataclass(frozen=True)
class EquilibriumUnknowns:
    """Lateral acceleration, sideslip, steer and rear slip of a steady turn."""

    a_lat: float
    beta: float
    delta: float
    kappa_r: float

    def __post_init__(self):
        if not np.all(np.isfinite(self.as_array())):
            raise InvalidInputError("Equilibrium unknowns must be finite")
        if self.kappa_r <= -1.0:
            raise InvalidInputError("kappa_r must be greater than -1")

    def as_array(self) -> FloatArray:
        return np.array([self.a_lat, self.beta, self.delta, self.kappa_r])

    @classmethod
    def from_array(cls, values) -> "EquilibriumUnknowns":
        values = np.asarray(values, dtype=np.float64)
        if values.shape != (4,):
            raise InvalidInputError(f"Expected 4 unknowns, got shape {values.shape}")
        return cls(*(float(v) for v in values))

    def mirrored(self) -> "EquilibriumUnknowns":
        return EquilibriumUnknowns(-self.a_lat, -self.beta, -self.delta, self.kappa_r)


@dataclass(frozen=True)
class EquilibriumPoint:
    """A converged cornering equilibrium at speed ``v`` with its diagnostics."""

    unknowns: EquilibriumUnknowns
    v: float
    loads: NormalLoads
    residual_norm: float
    beta_r: float = 0.0
    beta_f: float = 0.0
    mu_rx: float = 0.0
    tangent: Optional[FloatArray] = None

    @property
    def psidot(self) -> float:
        return self.unknowns.a_lat / self.v

    def state(self, x: float = 0.0, y: float = 0.0, psi: float = 0.0) -> CarState:
        return CarState.from_speed_sideslip(
            self.v, self.unknowns.beta, self.psidot, x=x, y=y, psi=psi
        )

    def car_input(self) -> CarInput:
        return CarInput(delta=self.unknowns.delta, kappa_r=self.unknowns.kappa_r)

    def row(self) -> Dict[str, float]:
        u = self.unknowns
        return {
            "v": self.v,
            "a_lat": u.a_lat,
            "beta": u.beta,
            "beta_r": self.beta_r,
            "beta_f": self.beta_f,
            "delta": u.delta,
            "kappa_r": u.kappa_r,
            "mu_rx": self.mu_rx,
            "ffz": float(self.loads.ffz),
            "frz": float(self.loads.frz),
            "residual_norm": self.residual_norm,
        }


@dataclass
class ManifoldBranch:
    """Ordered trace of equilibria at one speed.

    ``arclength`` is cumulative in the scaled unknowns used for stepping and
    ``orientation`` is the sign applied to the first tangent.
    """

    v: float
    points: List[EquilibriumPoint] = field(default_factory=list)
    arclength: List[float] = field(default_factory=list)
    orientation: int = 1
    wheelbase: float = float("nan")
    stop_reason: Optional[StopReason] = None
    label: Dict[str, Any] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.points)

    def unknowns(self) -> FloatArray:
        """(n, 4) array of (a_lat, beta, delta, kappa_r)."""
        return np.array([p.unknowns.as_array() for p in self.points]).reshape(-1, 4)

    def column(self, name: str) -> FloatArray:
        return np.asarray(self.to_frame()[name].to_numpy(), dtype=np.float64)

    def tangents(self) -> FloatArray:
        return np.array(
            [
                p.tangent if p.tangent is not None else np.full(4, np.nan)
                for p in self.points
            ]
        ).reshape(-1, 4)

    def fold_indices(self) -> List[int]:
        """Indices where the a_lat component of the tangent changes sign.

        The returned index is the accepted point just before the sign change.
        """
        component = self.tangents()[:, 0]
        signs = np.sign(component)
        return [
            i
            for i in range(len(signs) - 1)
            if signs[i] != 0.0 and signs[i] * signs[i + 1] < 0.0
        ]

    def max_lateral_acceleration(self) -> float:
        if not self.points:
            raise InvalidInputError("Branch is empty")
        return float(np.max(np.abs(self.unknowns()[:, 0])))

    def counter_steer_points(self, tol: float = 1e-9) -> List[int]:
        """Points steering against the turn, sign(delta) != sign(a_lat)."""
        x = self.unknowns()
        mask = (np.abs(x[:, 0]) > tol) & (np.abs(x[:, 2]) > tol) & (x[:, 0] * x[:, 2] < 0)
        return [int(i) for i in np.flatnonzero(mask)]

    def pre_fold(self) -> "ManifoldBranch":
        """Leading segment up to and including the first fold point."""
        folds = self.fold_indices()
        end = folds[0] + 1 if folds else len(self.points)
        return ManifoldBranch(
            v=self.v,
            points=self.points[:end],
            arclength=self.arclength[:end],
            orientation=self.orientation,
            wheelbase=self.wheelbase,
            stop_reason=self.stop_reason,
            label=dict(self.label),
        )

    def to_frame(self) -> pd.DataFrame:
        rows = [
            {"index": i, "arclength": s, **p.row()}
            for i, (p, s) in enumerate(zip(self.points, self.arclength))
        ]
        return pd.DataFrame(rows, columns=BRANCH_COLUMNS)

    def summary(self) -> Dict[str, Any]:
        folds = self.fold_indices()
        x = self.unknowns()
        return {
            "v": self.v,
            "points": len(self.points),
            "stop_reason": self.stop_reason,
            "max_a_lat": self.max_lateral_acceleration() if self.points else None,
            "fold": (
                {
                    "index": folds[0],
                    "a_lat": float(x[folds[0], 0]),
                    "delta": float(x[folds[0], 2]),
                }
                if folds
                else None
            ),
            "counter_steering": bool(self.counter_steer_points()),
            **self.label,
        }
