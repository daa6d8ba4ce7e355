# Copyright (c) 2025 Bytedance Ltd. and/or its affiliates
# SPDX-License-Identifier: MIT

from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Protocol, Sequence

import numpy as np
import pandas as pd
from scipy import linalg

from src.tire.types import FloatArray
from src.utils.exceptions import InvalidInputError
from src.vehicle.types import INPUT_NAMES, STATE_NAMES

TRAJECTORY_COLUMNS = ["t", *STATE_NAMES, *INPUT_NAMES]
GRID_RTOL = 1e-9


class Dynamics(Protocol):
    """Anything exposing a batched right-hand side ``rhs(x, u)``."""

    def rhs(self, x: FloatArray, u: FloatArray) -> FloatArray: ...


@dataclass(frozen=True)
class Curve:
    """State and input samples on a uniform time grid.

    Inputs are held constant over each step; the last input sample only
    enters the cost.
    """

    times: FloatArray
    states: FloatArray
    inputs: FloatArray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=np.float64)
        states = np.asarray(self.states, dtype=np.float64)
        inputs = np.asarray(self.inputs, dtype=np.float64)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "inputs", inputs)
        if times.ndim != 1 or times.size < 2:
            raise InvalidInputError("A curve needs at least two time samples")
        if states.ndim != 2 or inputs.ndim != 2:
            raise InvalidInputError("States and inputs must be 2-D sample arrays")
        if states.shape[0] != times.size or inputs.shape[0] != times.size:
            raise InvalidInputError(
                f"Sample counts differ: {times.size} times, {states.shape[0]} "
                f"states, {inputs.shape[0]} inputs"
            )
        steps = np.diff(times)
        if np.any(steps <= 0.0):
            raise InvalidInputError("Time grid must be strictly increasing")
        if not np.allclose(steps, steps[0], rtol=GRID_RTOL, atol=0.0):
            raise InvalidInputError("Time grid must be uniform")
        if not (np.all(np.isfinite(states)) and np.all(np.isfinite(inputs))):
            raise InvalidInputError("Curve samples must be finite")

    def __len__(self) -> int:
        return self.times.size

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    @property
    def duration(self) -> float:
        return float(self.times[-1] - self.times[0])

    def same_grid(self, other: "Curve") -> bool:
        return len(self) == len(other) and np.allclose(
            self.times, other.times, rtol=GRID_RTOL, atol=1e-12
        )

    def shifted(self, d_states: FloatArray, d_inputs: FloatArray, gamma=1.0) -> "Curve":
        return Curve(
            self.times, self.states + gamma * d_states, self.inputs + gamma * d_inputs
        )

    def to_frame(self) -> pd.DataFrame:
        if self.states.shape[1] != len(STATE_NAMES) or self.inputs.shape[1] != len(
            INPUT_NAMES
        ):
            raise InvalidInputError("Only car curves can be written as tables")
        data = np.column_stack([self.times, self.states, self.inputs])
        return pd.DataFrame(data, columns=TRAJECTORY_COLUMNS)

    @classmethod
    def from_frame(cls, frame: pd.DataFrame) -> "Curve":
        missing = [c for c in ("t", *STATE_NAMES) if c not in frame.columns]
        if missing:
            raise InvalidInputError(f"Curve table misses columns {missing}")
        inputs = np.column_stack(
            [
                frame[c].to_numpy(dtype=np.float64)
                if c in frame.columns
                else np.zeros(len(frame))
                for c in INPUT_NAMES
            ]
        )
        return cls(
            frame["t"].to_numpy(dtype=np.float64),
            frame[list(STATE_NAMES)].to_numpy(dtype=np.float64),
            inputs,
        )


@dataclass(frozen=True)
class Trajectory(Curve):
    """A curve generated by the fixed-step flow of the dynamics."""

    def defect(self, model: Dynamics) -> float:
        """Largest scaled one-step mismatch against the RK4 step map."""
        from .integrate import rk4_step

        predicted = rk4_step(model, self.states[:-1], self.inputs[:-1], self.dt)
        mismatch = np.abs(predicted - self.states[1:]) / (1.0 + np.abs(self.states[1:]))
        return float(np.max(mismatch))

    @classmethod
    def from_curve(cls, curve: Curve) -> "Trajectory":
        return cls(curve.times, curve.states, curve.inputs)


def _check_psd(name: str, matrix: FloatArray, strict: bool) -> FloatArray:
    matrix = np.atleast_2d(np.asarray(matrix, dtype=np.float64))
    if matrix.shape[0] != matrix.shape[1] or not np.allclose(matrix, matrix.T):
        raise InvalidInputError(f"{name} must be a symmetric square matrix")
    if strict:
        try:
            linalg.cholesky(matrix)
        except linalg.LinAlgError as e:
            raise InvalidInputError(f"{name} must be positive definite") from e
    elif np.min(np.linalg.eigvalsh(matrix)) < -1e-12 * max(1.0, np.abs(matrix).max()):
        raise InvalidInputError(f"{name} must be positive semidefinite")
    return matrix


@dataclass(frozen=True)
class Weights:
    """Cost weights (Q, R, P1) and regulator weights (Q_K, R_K)."""

    Q: FloatArray
    R: FloatArray
    P1: FloatArray
    Q_K: FloatArray
    R_K: FloatArray

    def __post_init__(self):
        for name, strict in (("Q", False), ("R", True), ("P1", False)):
            object.__setattr__(self, name, _check_psd(name, getattr(self, name), strict))
        for name, strict in (("Q_K", False), ("R_K", True)):
            object.__setattr__(self, name, _check_psd(name, getattr(self, name), strict))
        n, m = self.Q.shape[0], self.R.shape[0]
        if self.P1.shape != (n, n) or self.Q_K.shape != (n, n) or self.R_K.shape != (m, m):
            raise InvalidInputError("Weight dimensions are inconsistent")

    @classmethod
    def diagonal(
        cls,
        q: Sequence[float] = (10.0, 10.0, 1.0, 1.0, 1.0, 1.0),
        r: Sequence[float] = (0.1, 0.1, 0.1),
        p1: Optional[Sequence[float]] = None,
        q_k: Optional[Sequence[float]] = None,
        r_k: Optional[Sequence[float]] = None,
    ) -> "Weights":
        """Diagonal weights; P1 and Q_K default to Q, R_K to R."""
        Q, R = np.diag(q), np.diag(r)
        return cls(
            Q=Q,
            R=R,
            P1=np.diag(p1) if p1 is not None else Q.copy(),
            Q_K=np.diag(q_k) if q_k is not None else Q.copy(),
            R_K=np.diag(r_k) if r_k is not None else R.copy(),
        )

    def with_input_weight(self, R: FloatArray) -> "Weights":
        return replace(self, R=R)

    def describe(self) -> Dict[str, Any]:
        return {name: getattr(self, name).tolist() for name in ("Q", "R", "P1", "Q_K", "R_K")}


@dataclass(frozen=True)
class GainSchedule:
    """Feedback matrices K(t) of shape (N, m, n) on a trajectory grid."""

    times: FloatArray
    K: FloatArray
    P: Optional[FloatArray] = None

    def __post_init__(self):
        if self.K.ndim != 3 or self.K.shape[0] != np.asarray(self.times).size:
            raise InvalidInputError("Gain schedule must have one matrix per sample")
        if not np.all(np.isfinite(self.K)):
            raise InvalidInputError("Gain schedule must be finite")


@dataclass(frozen=True)
class StepJacobians:
    """Discrete Jacobians A_k, B_k of the step map, k = 0..N-2."""

    A: FloatArray
    B: FloatArray


@dataclass
class IterateRecord:
    iter: int
    cost: float
    grad_zeta: float
    gamma: Optional[float] = None

    def as_dict(self) -> Dict[str, Any]:
        return {
            "iter": self.iter,
            "cost": self.cost,
            "grad_zeta": self.grad_zeta,
            "gamma": self.gamma,
        }


@dataclass
class NewtonResult:
    trajectory: Trajectory
    iterates: List[IterateRecord] = field(default_factory=list)
    status: str = "max_iter"  # converged | max_iter | stall

    @property
    def cost(self) -> float:
        return self.iterates[-1].cost if self.iterates else float("nan")

    @property
    def costs(self) -> List[float]:
        return [record.cost for record in self.iterates]

    def __iter__(self):
        # unpacks as (trajectory, iterate log)
        return iter((self.trajectory, [r.as_dict() for r in self.iterates]))
