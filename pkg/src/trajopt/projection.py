# Copyright (c) 2025 Bytedance Ltd. and/or its affiliates
# SPDX-License-Identifier: MIT

"""
Projection onto the trajectory manifold.

A curve (alpha, mu) is mapped to the trajectory of the closed loop

    u_k = mu_k + K_k (alpha_k - x_k),    x_{k+1} = Phi(x_k, u_k),    x_0 = alpha_0

where Phi is the RK4 step with the input held over the step and K is a
time-varying LQR gain designed around a nearby trajectory. A trajectory is a
fixed point of the map.
"""

import logging
from typing import Optional

import numpy as np
from scipy import linalg

from src.tire.types import FloatArray
from src.utils.exceptions import IntegrationError, InvalidInputError, LtcarError, RiccatiError

from .integrate import linearize, rk4_step
from .types import Curve, Dynamics, GainSchedule, Trajectory, Weights

logger = logging.getLogger(__name__)

BLOW_UP = 1e12


def riccati_sweep(
    A: FloatArray,
    B: FloatArray,
    Q: FloatArray,
    R: FloatArray,
    P_T: FloatArray,
    dt: float,
) -> FloatArray:
    """Backward RK4 integration of the differential Riccati equation.

    -dP/dt = A'P + PA - P B R^-1 B' P + Q with P(T) = P_T, on the grid of the
    sampled A(t), B(t); midpoint matrices are averages of neighbours.

    Returns:
        (N, n, n) solution samples

    Raises:
        RiccatiError: the solution left the finite range
    """
    N = A.shape[0]
    R_inv = linalg.inv(R)
    P = np.empty((N,) + np.shape(P_T))
    P[-1] = P_T

    def rate(P_, A_, B_):
        S = B_ @ R_inv @ B_.T
        return -(A_.T @ P_ + P_ @ A_ - P_ @ S @ P_ + Q)

    for k in range(N - 1, 0, -1):
        A_mid, B_mid = 0.5 * (A[k] + A[k - 1]), 0.5 * (B[k] + B[k - 1])
        h = -dt
        k1 = rate(P[k], A[k], B[k])
        k2 = rate(P[k] + 0.5 * h * k1, A_mid, B_mid)
        k3 = rate(P[k] + 0.5 * h * k2, A_mid, B_mid)
        k4 = rate(P[k] + h * k3, A[k - 1], B[k - 1])
        P_next = P[k] + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        P_next = 0.5 * (P_next + P_next.T)
        if not np.all(np.isfinite(P_next)) or np.abs(P_next).max() > BLOW_UP:
            raise RiccatiError("Riccati solution blew up", time=(k - 1) * dt)
        P[k - 1] = P_next
    logger.debug(f"Riccati sweep over {N} samples, |P(0)| = {np.linalg.norm(P[0]):.3e}")
    return P


def design_gain(traj: Curve, weights: Weights, model: Dynamics) -> GainSchedule:
    """Finite-horizon LQR gain K(t) = R_K^-1 B(t)' P(t) along a trajectory."""
    A, B = linearize(model, traj)
    P = riccati_sweep(A, B, weights.Q_K, weights.R_K, weights.Q_K, traj.dt)
    K = np.linalg.solve(weights.R_K, np.swapaxes(B, 1, 2) @ P)
    return GainSchedule(times=traj.times, K=K, P=P)


def project(xi: Curve, K: GainSchedule, model: Dynamics) -> Trajectory:
    """Closed-loop integration of the tracking law around ``xi``.

    Raises:
        IntegrationError: the closed loop failed at the reported time
    """
    if K.K.shape[0] != len(xi):
        raise InvalidInputError("Gain schedule and curve have different grids")
    alpha, mu, dt = xi.states, xi.inputs, xi.dt
    states = np.empty_like(alpha)
    inputs = np.empty_like(mu)
    states[0] = alpha[0]
    n = len(xi)
    for k in range(n):
        inputs[k] = mu[k] + K.K[k] @ (alpha[k] - states[k])
        if k == n - 1:
            break
        try:
            states[k + 1] = rk4_step(model, states[k], inputs[k], dt)
        except LtcarError as e:
            raise IntegrationError(str(e), time=float(xi.times[k]), cause=e) from e
        if not np.all(np.isfinite(states[k + 1])):
            raise IntegrationError("State became non-finite", time=float(xi.times[k + 1]))
    return Trajectory(xi.times, states, inputs)


def quadrature_weights(curve: Curve) -> FloatArray:
    w = np.full(len(curve), curve.dt)
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


def cost(xi: Curve, xi_d: Curve, weights: Weights, parts: Optional[dict] = None) -> float:
    """Trapezoidal least-squares tracking cost with terminal penalty.

    g = 1/2 sum_k w_k (|x_k - x_d,k|_Q^2 + |u_k - u_d,k|_R^2) + 1/2 |e_N|_P1^2
    """
    if not xi.same_grid(xi_d):
        raise InvalidInputError("Cost needs both curves on the same grid")
    e = xi.states - xi_d.states
    e_u = xi.inputs - xi_d.inputs
    w = quadrature_weights(xi)
    state_term = 0.5 * float(np.sum(w * np.einsum("ki,ij,kj->k", e, weights.Q, e)))
    input_term = 0.5 * float(np.sum(w * np.einsum("ki,ij,kj->k", e_u, weights.R, e_u)))
    terminal = 0.5 * float(e[-1] @ weights.P1 @ e[-1])
    if parts is not None:
        parts.update(state=state_term, input=input_term, terminal=terminal)
    return state_term + input_term + terminal
