# Copyright (c) 2025 Bytedance Ltd. and/or its affiliates
# SPDX-License-Identifier: MIT

"""
Projection-operator Newton method for the least-squares tracking problem.

Each iteration designs a gain around the current trajectory, solves a
linear-quadratic problem on the tangent space of the trajectory manifold for
the descent direction, and projects a backtracked step back onto the
manifold.
"""

import logging
from typing import Literal, Optional, Tuple

import numpy as np
from scipy import linalg

from src.tire.types import FloatArray
from src.utils.exceptions import (
    InvalidInputError,
    LineSearchStall,
    NumericalError,
)

from .integrate import linearize_step, step_hessians
from .projection import cost, design_gain, project, quadrature_weights
from .types import (
    Curve,
    Dynamics,
    GainSchedule,
    IterateRecord,
    NewtonResult,
    StepJacobians,
    Trajectory,
    Weights,
)

logger = logging.getLogger(__name__)

NewtonMode = Literal["gauss-newton", "full"]


class _NotConvex(Exception):
    pass


def _errors(xi: Curve, xi_d: Curve) -> Tuple[FloatArray, FloatArray]:
    if not xi.same_grid(xi_d):
        raise InvalidInputError("Trajectory and desired curve have different grids")
    return xi.states - xi_d.states, xi.inputs - xi_d.inputs


def tangent_from_inputs(zeta_u: FloatArray, lin: StepJacobians) -> FloatArray:
    """State part of the tangent vector driven by ``zeta_u`` from zeta_x(0) = 0."""
    n = lin.A.shape[1]
    zeta_x = np.zeros((zeta_u.shape[0], n))
    for k in range(zeta_u.shape[0] - 1):
        zeta_x[k + 1] = lin.A[k] @ zeta_x[k] + lin.B[k] @ zeta_u[k]
    return zeta_x


def directional_derivative(
    zeta: Curve, xi: Curve, xi_d: Curve, weights: Weights
) -> float:
    """Dg(xi) . zeta for the trapezoidal cost."""
    e, e_u = _errors(xi, xi_d)
    w = quadrature_weights(xi)
    running = np.einsum("k,ki,ij,kj->", w, e, weights.Q, zeta.states) + np.einsum(
        "k,ki,ij,kj->", w, e_u, weights.R, zeta.inputs
    )
    return float(running + e[-1] @ weights.P1 @ zeta.states[-1])


def cost_gradient(
    xi: Curve, xi_d: Curve, weights: Weights, lin: StepJacobians
) -> FloatArray:
    """Gradient of the cost with respect to input perturbations on the tangent space.

    Uses the adjoint of the linearized step map, so that
    Dg . zeta = sum_k grad_k' zeta_u,k when zeta_x follows from zeta_u.
    """
    e, e_u = _errors(xi, xi_d)
    w = quadrature_weights(xi)
    N = len(xi)
    grad = w[:, None] * (e_u @ weights.R)
    lam = w[-1] * weights.Q @ e[-1] + weights.P1 @ e[-1]
    for k in range(N - 2, -1, -1):
        grad[k] += lin.B[k].T @ lam
        lam = w[k] * weights.Q @ e[k] + lin.A[k].T @ lam
    return grad


def _closed_loop_hessians(
    xi: Trajectory,
    xi_d: Curve,
    K: GainSchedule,
    weights: Weights,
    model: Dynamics,
    lin: StepJacobians,
) -> FloatArray:
    # adjoint of the second variation of the projected closed loop
    e, e_u = _errors(xi, xi_d)
    w = quadrature_weights(xi)
    N, n = e.shape
    stage = w[:, None] * (e @ weights.Q - np.einsum("kmi,km->ki", K.K, e_u @ weights.R))
    lam = np.empty((N, n))
    lam[-1] = stage[-1] + weights.P1 @ e[-1]
    for k in range(N - 2, -1, -1):
        closed = lin.A[k] - lin.B[k] @ K.K[k]
        lam[k] = stage[k] + closed.T @ lam[k + 1]
    return step_hessians(model, xi, lam[1:])


def _solve_lq(
    lin: StepJacobians,
    w: FloatArray,
    weights: Weights,
    e: FloatArray,
    e_u: FloatArray,
    hessians: Optional[FloatArray],
) -> Tuple[FloatArray, FloatArray]:
    A, B = lin.A, lin.B
    N, n = e.shape
    m = e_u.shape[1]
    Q, R = weights.Q, weights.R
    S = w[-1] * Q + weights.P1
    s = S @ e[-1]
    gains = np.zeros((N - 1, m, n))
    offsets = np.zeros((N - 1, m))
    for k in range(N - 2, -1, -1):
        Qxx, Quu, Qux = w[k] * Q, w[k] * R, np.zeros((m, n))
        if hessians is not None:
            H = hessians[k]
            Qxx = Qxx + H[:n, :n]
            Quu = Quu + H[n:, n:]
            Qux = H[n:, :n]
        H_uu = Quu + B[k].T @ S @ B[k]
        H_ux = Qux + B[k].T @ S @ A[k]
        h_u = w[k] * R @ e_u[k] + B[k].T @ s
        try:
            factor = linalg.cho_factor(0.5 * (H_uu + H_uu.T))
        except linalg.LinAlgError as err:
            raise _NotConvex(f"reduced Hessian not positive definite at step {k}") from err
        gains[k] = -linalg.cho_solve(factor, H_ux)
        offsets[k] = -linalg.cho_solve(factor, h_u)
        S = Qxx + A[k].T @ S @ A[k] + H_ux.T @ gains[k]
        S = 0.5 * (S + S.T)
        s = w[k] * Q @ e[k] + A[k].T @ s + H_ux.T @ offsets[k]

    zeta_x = np.zeros((N, n))
    zeta_u = np.zeros((N, m))
    for k in range(N - 1):
        zeta_u[k] = gains[k] @ zeta_x[k] + offsets[k]
        zeta_x[k + 1] = A[k] @ zeta_x[k] + B[k] @ zeta_u[k]
    # the last input only enters the running cost
    zeta_u[-1] = -e_u[-1]
    return zeta_x, zeta_u


def descent_direction(
    xi: Trajectory,
    xi_d: Curve,
    K: GainSchedule,
    weights: Weights,
    model: Dynamics,
    mode: NewtonMode = "gauss-newton",
    lin: Optional[StepJacobians] = None,
) -> Tuple[Curve, float]:
    """Minimize Dg.zeta + 1/2 D2g(zeta, zeta) over the tangent space at ``xi``.

    Gauss-Newton keeps only the cost curvature. ``full`` adds the curvature of
    the projection, and falls back to Gauss-Newton when that subproblem is not
    convex.

    Returns:
        (zeta, Dg . zeta)
    """
    if mode not in ("gauss-newton", "full"):
        raise InvalidInputError(f"Unknown Newton mode {mode}")
    lin = lin if lin is not None else linearize_step(model, xi)
    e, e_u = _errors(xi, xi_d)
    w = quadrature_weights(xi)
    hessians = None
    if mode == "full":
        hessians = _closed_loop_hessians(xi, xi_d, K, weights, model, lin)
    try:
        zeta_x, zeta_u = _solve_lq(lin, w, weights, e, e_u, hessians)
    except _NotConvex as err:
        if hessians is None:
            raise NumericalError(f"Gauss-Newton subproblem failed: {err}") from err
        logger.warning(f"Full Newton step rejected ({err}); using Gauss-Newton")
        zeta_x, zeta_u = _solve_lq(lin, w, weights, e, e_u, None)
    zeta = Curve(xi.times, zeta_x, zeta_u)
    return zeta, directional_derivative(zeta, xi, xi_d, weights)


def line_search(
    xi: Trajectory,
    zeta: Curve,
    xi_d: Curve,
    K: GainSchedule,
    weights: Weights,
    model: Dynamics,
    slope: float,
    sigma: float = 0.4,
    max_backtracks: int = 12,
    current_cost: Optional[float] = None,
) -> Tuple[float, Trajectory, float]:
    """Armijo backtracking over gamma = 1, 1/2, ..., 2^-max_backtracks.

    A step whose projection fails counts as rejected.

    Returns:
        (gamma, projected trajectory, its cost)

    Raises:
        LineSearchStall: no step satisfied sufficient decrease
    """
    if not slope < 0.0:
        raise LineSearchStall(f"Direction is not a descent direction (slope {slope:.3e})")
    g0 = current_cost if current_cost is not None else cost(xi, xi_d, weights)
    gamma = 1.0
    for _ in range(max_backtracks + 1):
        try:
            candidate = project(xi.shifted(zeta.states, zeta.inputs, gamma), K, model)
            g = cost(candidate, xi_d, weights)
        except (NumericalError, InvalidInputError) as e:
            logger.debug(f"gamma={gamma:.3e} rejected: {e}")
        else:
            logger.debug(f"gamma={gamma:.3e}: cost {g:.6e} (from {g0:.6e})")
            if g <= g0 + sigma * gamma * slope:
                return gamma, candidate, g
        gamma /= 2.0
    raise LineSearchStall(
        f"No step in [2^-{max_backtracks}, 1] decreased the cost {g0:.6e}"
    )


def po_newton(
    xi0: Trajectory,
    xi_d: Curve,
    weights: Weights,
    model: Dynamics,
    grad_tol: float = 1e-6,
    max_iter: int = 50,
    sigma: float = 0.4,
    max_backtracks: int = 12,
    mode: NewtonMode = "gauss-newton",
) -> NewtonResult:
    """Minimize the tracking cost over the trajectory manifold from ``xi0``.

    Stops when |Dg.zeta| <= grad_tol (1 + g), after ``max_iter`` steps, or
    when the line search stalls.
    """
    xi = xi0
    g = cost(xi, xi_d, weights)
    result = NewtonResult(trajectory=xi)
    for i in range(max_iter + 1):
        K = design_gain(xi, weights, model)
        zeta, slope = descent_direction(xi, xi_d, K, weights, model, mode)
        record = IterateRecord(iter=i, cost=g, grad_zeta=slope)
        result.iterates.append(record)
        logger.debug(f"Iteration {i}: cost {g:.6e}, Dg.zeta {slope:.3e}")
        if abs(slope) <= grad_tol * (1.0 + g):
            result.status = "converged"
            break
        if i == max_iter:
            break
        try:
            gamma, xi, g = line_search(
                xi, zeta, xi_d, K, weights, model, slope, sigma, max_backtracks, g
            )
        except LineSearchStall as e:
            logger.warning(f"Stopping at iteration {i}: {e}")
            result.status = "stall"
            break
        record.gamma = gamma
    result.trajectory = xi
    logger.info(
        f"PO-Newton {result.status} after {len(result.iterates) - 1} steps, "
        f"cost {result.iterates[0].cost:.6e} -> {g:.6e}"
    )
    return result
