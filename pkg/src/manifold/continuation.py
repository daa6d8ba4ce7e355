# Copyright (c) 2025 Bytedance Ltd. and/or its affiliates
# SPDX-License-Identifier: MIT

"""
Predictor-corrector continuation of the equilibrium manifold at fixed speed.

Stepping happens in scaled unknowns ``x / scale`` so that one unit of
arclength weighs a_lat, the angles and kappa_r comparably. The predictor is an
Euler step along the unit kernel vector of the scaled Jacobian; the corrector
iterates the pseudoinverse Newton map, which returns the solution nearest to
the predicted point.
"""

import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from src.tire.types import FloatArray
from src.utils.exceptions import (
    DegenerateSpeedError,
    IllPosedModelError,
    InfeasibleEquilibriumError,
    InvalidInputError,
    NoConvergenceError,
    SingularPointError,
)
from src.vehicle import CarModel

from .residual import evaluate_point, jacobian, residual
from .types import EquilibriumPoint, EquilibriumUnknowns, ManifoldBranch

logger = logging.getLogger(__name__)

DEFAULT_SCALE = (10.0, 0.1, 0.1, 0.1)
RANK_TOL = 1e-10

# evaluation failures that a smaller continuation step can recover from
_RECOVERABLE = (NoConvergenceError, IllPosedModelError, DegenerateSpeedError)


def tangent(J: FloatArray, prev: Optional[FloatArray] = None) -> FloatArray:
    """Unit kernel vector of a 3x4 Jacobian.

    The sign makes the inner product with ``prev`` positive; without ``prev``
    the first (a_lat) component is made positive.

    Raises:
        SingularPointError: the kernel is not one-dimensional
    """
    J = np.asarray(J, dtype=np.float64)
    _, s, vh = np.linalg.svd(J)
    if s[0] == 0.0 or s[-1] <= RANK_TOL * s[0]:
        raise SingularPointError(
            f"Jacobian rank below 3 (singular values {np.array2string(s, precision=3)})"
        )
    t = vh[-1]
    reference = t @ prev if prev is not None else t[0]
    if reference < 0.0:
        t = -t
    return t / np.linalg.norm(t)


def newton_correct(
    alpha,
    v: float,
    model: CarModel,
    nu: float = 1e-8,
    max_iter: int = 20,
    scale: Sequence[float] = DEFAULT_SCALE,
) -> EquilibriumPoint:
    """Pseudoinverse Newton iteration from ``alpha`` onto the manifold.

    Each update is the minimum-norm solution (in scaled unknowns) of the
    linearized residual, so it lies in the row space of the Jacobian.

    Raises:
        NoConvergenceError: the residual is above ``nu`` after ``max_iter``
    """
    scale = np.asarray(scale, dtype=np.float64)
    x = np.array(
        alpha.as_array() if isinstance(alpha, EquilibriumUnknowns) else alpha,
        dtype=np.float64,
    )
    f = residual(x, v, model)
    norm = float(np.linalg.norm(f))
    for iteration in range(max_iter):
        if norm <= nu:
            break
        J = jacobian(x, v, model) * scale
        step, *_ = np.linalg.lstsq(J, -f, rcond=None)
        x = x + scale * step
        f = residual(x, v, model)
        norm = float(np.linalg.norm(f))
        logger.debug(f"Corrector iteration {iteration + 1}: |f| = {norm:.3e}")
    if not norm <= nu:
        raise NoConvergenceError(
            f"Corrector stopped at |f| = {norm:.3e} after {max_iter} iterations",
            residual_norm=norm,
        )
    return evaluate_point(x, v, model)


def _with_tangent(point: EquilibriumPoint, t: FloatArray, scale) -> EquilibriumPoint:
    physical = t * scale
    return EquilibriumPoint(
        unknowns=point.unknowns,
        v=point.v,
        loads=point.loads,
        residual_norm=point.residual_norm,
        beta_r=point.beta_r,
        beta_f=point.beta_f,
        mu_rx=point.mu_rx,
        tangent=physical / np.linalg.norm(physical),
    )


def trace_branch(
    x0,
    v: float,
    model: CarModel,
    eps0: float = 0.05,
    nu: float = 1e-8,
    max_points: int = 2000,
    max_corrector_iter: int = 20,
    scale: Sequence[float] = DEFAULT_SCALE,
    delta_limit: float = np.pi / 2,
    min_step: float = 1e-6,
    orientation: int = 1,
) -> ManifoldBranch:
    """Trace one slice of the equilibrium manifold from a seed.

    Args:
        x0: seed unknowns with residual at most ``nu``
        v: speed of the slice [m/s]
        model: car model (load-transfer or bicycle, tire mode)
        eps0: initial and maximum step in scaled unknowns
        orientation: +1 follows increasing a_lat at the seed, -1 the mirror

    Returns:
        The branch; ``stop_reason`` tells which termination rule fired.
    """
    if orientation not in (1, -1):
        raise InvalidInputError(f"orientation must be +1 or -1, got {orientation}")
    scale = np.asarray(scale, dtype=np.float64)
    seed = evaluate_point(x0, v, model)
    if seed.residual_norm > nu:
        raise InvalidInputError(
            f"Seed is not an equilibrium: |f| = {seed.residual_norm:.3e} > {nu}"
        )

    t = orientation * tangent(jacobian(seed.unknowns.as_array(), v, model) * scale)
    branch = ManifoldBranch(
        v=float(v), orientation=orientation, wheelbase=model.vehicle.wheelbase
    )
    branch.points.append(_with_tangent(seed, t, scale))
    branch.arclength.append(0.0)

    y = seed.unknowns.as_array() / scale
    eps = eps0
    last_failure: Optional[Exception] = None
    while len(branch.points) < max_points:
        if eps < min_step:
            branch.stop_reason = (
                "ill_posed"
                if isinstance(last_failure, (IllPosedModelError, DegenerateSpeedError))
                else "step_size"
            )
            break
        try:
            point = newton_correct(
                scale * (y + eps * t), v, model, nu, max_corrector_iter, scale
            )
        except (*_RECOVERABLE, InvalidInputError) as e:
            last_failure = e
            eps /= 2.0
            logger.debug(f"Corrector failed ({e}); step halved to {eps:.3e}")
            continue
        y_new = point.unknowns.as_array() / scale
        distance = float(np.linalg.norm(y_new - y))
        if distance > 2.0 * eps:
            # corrector jumped away from the predicted neighbourhood
            eps /= 2.0
            continue
        if abs(point.unknowns.delta) > delta_limit:
            branch.stop_reason = "delta_limit"
            break
        try:
            t_new = tangent(jacobian(y_new * scale, v, model) * scale, t)
        except SingularPointError as e:
            logger.info(f"Branch at v={v} stopped at a singular point: {e}")
            branch.stop_reason = "singular"
            break
        except _RECOVERABLE as e:
            last_failure = e
            eps /= 2.0
            continue
        branch.points.append(_with_tangent(point, t_new, scale))
        branch.arclength.append(branch.arclength[-1] + distance)
        y, t = y_new, t_new
        eps = min(2.0 * eps, eps0)
    else:
        branch.stop_reason = "max_points"

    logger.info(
        f"Traced branch at v={v} m/s: {len(branch)} points, "
        f"max |a_lat| {branch.max_lateral_acceleration():.3f} m/s^2, "
        f"stop: {branch.stop_reason}"
    )
    return branch


def solve_point(
    v: float,
    a_lat: float,
    model: CarModel,
    guess: Tuple[float, float, float] = (0.0, 0.0, 0.0),
    nu: float = 1e-8,
    max_iter: int = 30,
    max_step: float = 0.1,
) -> EquilibriumPoint:
    """Square Newton solve for (beta, delta, kappa_r) at fixed (v, a_lat).

    Steps are limited to ``max_step`` in each unknown and backtracked until
    the residual decreases, so the solution returned is the one in the basin
    of ``guess``.

    Raises:
        InfeasibleEquilibriumError: no equilibrium reached from ``guess``
    """
    z = np.asarray(guess, dtype=np.float64)

    def evaluate(z_: FloatArray) -> Optional[FloatArray]:
        try:
            return residual(np.concatenate([[a_lat], z_]), v, model)
        except (IllPosedModelError, DegenerateSpeedError, InvalidInputError):
            return None

    f = evaluate(z)
    if f is None:
        raise InfeasibleEquilibriumError(
            f"Guess {tuple(z)} is outside the model domain at v={v}, a_lat={a_lat}"
        )
    norm = float(np.linalg.norm(f))
    for _ in range(max_iter):
        if norm <= nu:
            break
        J = jacobian(np.concatenate([[a_lat], z]), v, model)[:, 1:]
        try:
            step = np.linalg.solve(J, -f)
        except np.linalg.LinAlgError:
            break
        largest = float(np.max(np.abs(step)))
        if largest > max_step:
            step *= max_step / largest
        gamma = 1.0
        for _ in range(12):
            candidate = z + gamma * step
            f_new = evaluate(candidate)
            if f_new is not None and np.linalg.norm(f_new) < norm:
                z, f = candidate, f_new
                norm = float(np.linalg.norm(f))
                break
            gamma /= 2.0
        else:
            break
    if not norm <= nu:
        raise InfeasibleEquilibriumError(
            f"No equilibrium at v={v} m/s, a_lat={a_lat} m/s^2 (|f| = {norm:.3e})",
            residual_norm=norm,
        )
    return evaluate_point(np.concatenate([[a_lat], z]), v, model)
