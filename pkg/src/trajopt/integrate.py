# Copyright (c) 2025 Bytedance Ltd. and/or its affiliates
# SPDX-License-Identifier: MIT

"""
Fixed-step RK4 flow with zero-order-hold inputs and its linearizations.
"""

import logging
from typing import Tuple

import numpy as np

from src.tire.types import FloatArray
from src.utils.exceptions import IntegrationError, InvalidInputError, LtcarError

from .types import Curve, Dynamics, StepJacobians, Trajectory

logger = logging.getLogger(__name__)

FD_STEP = 1e-6


def rk4_step(model: Dynamics, x: FloatArray, u: FloatArray, dt: float) -> FloatArray:
    """One classical Runge-Kutta step with the input held over the step."""
    k1 = model.rhs(x, u)
    k2 = model.rhs(x + 0.5 * dt * k1, u)
    k3 = model.rhs(x + 0.5 * dt * k2, u)
    k4 = model.rhs(x + dt * k3, u)
    return x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate(
    x0: FloatArray,
    inputs: FloatArray,
    model: Dynamics,
    dt: float,
    t0: float = 0.0,
) -> Trajectory:
    """Integrate from ``x0`` under sampled inputs on a uniform grid.

    Raises:
        IntegrationError: the model failed (ill-posed loads, degenerate speed
            or non-finite state) at the reported time
    """
    inputs = np.asarray(inputs, dtype=np.float64)
    if dt <= 0.0:
        raise InvalidInputError(f"Step must be positive, got {dt}")
    n = inputs.shape[0]
    states = np.empty((n, np.size(x0)))
    states[0] = x0
    for k in range(n - 1):
        t = t0 + k * dt
        try:
            states[k + 1] = rk4_step(model, states[k], inputs[k], dt)
        except LtcarError as e:
            raise IntegrationError(str(e), time=t, cause=e) from e
        if not np.all(np.isfinite(states[k + 1])):
            raise IntegrationError("State became non-finite", time=t + dt)
    return Trajectory(t0 + dt * np.arange(n), states, inputs)


def _fd_steps(z: FloatArray, step: float) -> FloatArray:
    return step * np.maximum(1.0, np.abs(z))


def _batched_jacobians(
    fn, x: FloatArray, u: FloatArray, step: float
) -> Tuple[FloatArray, FloatArray]:
    # central differences in all n + m directions evaluated in one call
    n, m = x.shape[-1], u.shape[-1]
    z = np.concatenate([x, u], axis=-1)
    h = _fd_steps(z, step)
    eye = np.eye(n + m)
    offsets = eye[None, :, :] * h[:, None, :]
    plus = z[:, None, :] + offsets
    minus = z[:, None, :] - offsets
    both = np.concatenate([plus, minus], axis=1)
    values = fn(both[..., :n], both[..., n:])
    diff = (values[:, : n + m] - values[:, n + m :]) / (2.0 * h[:, :, None])
    jac = np.swapaxes(diff, 1, 2)
    return jac[:, :, :n], jac[:, :, n:]


def linearize(
    model: Dynamics, curve: Curve, step: float = FD_STEP
) -> Tuple[FloatArray, FloatArray]:
    """Continuous Jacobians A(t) = df/dx and B(t) = df/du at every sample."""
    return _batched_jacobians(model.rhs, curve.states, curve.inputs, step)


def linearize_step(
    model: Dynamics, curve: Curve, step: float = FD_STEP
) -> StepJacobians:
    """Jacobians of the RK4 step map x_{k+1} = Phi(x_k, u_k), k = 0..N-2."""
    dt = curve.dt
    A, B = _batched_jacobians(
        lambda x, u: rk4_step(model, x, u, dt),
        curve.states[:-1],
        curve.inputs[:-1],
        step,
    )
    return StepJacobians(A=A, B=B)


def step_hessians(
    model: Dynamics,
    curve: Curve,
    weights: FloatArray,
    step: float = 1e-4,
) -> FloatArray:
    """Hessians of lambda_k' Phi(x_k, u_k) in (x, u), one per step.

    Args:
        weights: (N-1, n) multipliers lambda_{k+1}

    Returns:
        (N-1, n+m, n+m) symmetric matrices
    """
    x, u = curve.states[:-1], curve.inputs[:-1]
    n, m = x.shape[1], u.shape[1]
    z = np.concatenate([x, u], axis=1)
    h = _fd_steps(z, step)
    size = n + m
    pairs = [(i, j) for i in range(size) for j in range(i, size)]
    offsets = []
    for i, j in pairs:
        for si, sj in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
            d = np.zeros((z.shape[0], size))
            d[:, i] += si * h[:, i]
            d[:, j] += sj * h[:, j]
            offsets.append(d)
    batch = z[:, None, :] + np.stack(offsets, axis=1)
    values = rk4_step(model, batch[..., :n], batch[..., n:], curve.dt)
    scalar = np.einsum("kpi,ki->kp", values, weights).reshape(z.shape[0], len(pairs), 4)
    hessians = np.zeros((z.shape[0], size, size))
    for p, (i, j) in enumerate(pairs):
        entry = (scalar[:, p, 0] - scalar[:, p, 1] - scalar[:, p, 2] + scalar[:, p, 3]) / (
            4.0 * h[:, i] * h[:, j]
        )
        hessians[:, i, j] = entry
        hessians[:, j, i] = entry
    return hessians


def resample_inputs(
    times: FloatArray, inputs: FloatArray, grid: FloatArray, hold: bool = True
) -> FloatArray:
    """Inputs on a new grid, zero-order held or linearly interpolated."""
    if hold:
        index = np.clip(np.searchsorted(times, grid, side="right") - 1, 0, len(times) - 1)
        return inputs[index]
    return np.column_stack([np.interp(grid, times, column) for column in inputs.T])
