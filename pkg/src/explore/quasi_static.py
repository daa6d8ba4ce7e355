# Copyright (c) 2025 Bytedance Ltd. and/or its affiliates
# SPDX-License-Identifier: MIT

"""
Quasi-static desired curves: cornering equilibria imposed sample by sample
along a path and speed profile.
"""

import logging
from dataclasses import dataclass
from typing import Literal, Tuple

import numpy as np

from src.manifold import EquilibriumPoint, solve_point
from src.trajopt import Curve
from src.utils.exceptions import (
    InfeasibleEquilibriumError,
    InvalidInputError,
    QuasiStaticInfeasibleError,
)
from src.vehicle import CarModel

from .tracks import DesiredPath, PathSpec, SpeedProfile, path_to_pose

logger = logging.getLogger(__name__)

QuasiStaticMode = Literal["pacejka", "linear", "auto"]

# substeps used to walk the equilibrium from one sample to the next
RAMP_STEPS = 10


@dataclass(frozen=True)
class DesiredCurve(Curve):
    """A desired curve that remembers which tire model produced it."""

    tire_mode: str = "pacejka"


def _solve_walk(
    v0: float,
    a0: float,
    v1: float,
    a1: float,
    model: CarModel,
    guess: Tuple[float, float, float],
    nu: float,
) -> EquilibriumPoint:
    # direct warm start first, then walk (v, a_lat) over substeps
    try:
        return solve_point(v1, a1, model, guess, nu=nu)
    except InfeasibleEquilibriumError:
        pass
    point = None
    for j in range(1, RAMP_STEPS + 1):
        fraction = j / RAMP_STEPS
        v = v0 + fraction * (v1 - v0)
        a = a0 + fraction * (a1 - a0)
        point = solve_point(v, a, model, guess, nu=nu)
        u = point.unknowns
        guess = (u.beta, u.delta, u.kappa_r)
    return point


def equilibrium_samples(
    pose: DesiredPath, model: CarModel, nu: float = 1e-8
) -> Tuple[np.ndarray, np.ndarray]:
    """(beta, delta, kappa_r) and residual norms at every pose sample.

    Raises:
        QuasiStaticInfeasibleError: first sample without an equilibrium
    """
    v = pose.v
    a_lat = v**2 * pose.sigma
    unknowns = np.zeros((v.size, 3))
    residuals = np.zeros(v.size)
    guess = (0.0, 0.0, 0.0)
    v_prev, a_prev = float(v[0]), 0.0
    for k in range(v.size):
        try:
            point = _solve_walk(
                v_prev, a_prev, float(v[k]), float(a_lat[k]), model, guess, nu
            )
        except InfeasibleEquilibriumError as e:
            raise QuasiStaticInfeasibleError(
                f"No {model.tires.mode} equilibrium at v={v[k]:.3f} m/s, "
                f"a_lat={a_lat[k]:.3f} m/s^2",
                time=float(pose.t[k]),
            ) from e
        u = point.unknowns
        guess = (u.beta, u.delta, u.kappa_r)
        unknowns[k] = guess
        residuals[k] = point.residual_norm
        v_prev, a_prev = float(v[k]), float(a_lat[k])
    return unknowns, residuals


def _assemble(pose: DesiredPath, unknowns: np.ndarray, tire_mode: str) -> DesiredCurve:
    beta, delta, kappa_r = unknowns.T
    states = np.column_stack(
        [
            pose.x,
            pose.y,
            pose.theta - beta,
            pose.v * np.cos(beta),
            pose.v * np.sin(beta),
            pose.v * pose.sigma,
        ]
    )
    inputs = np.column_stack([delta, kappa_r, np.zeros_like(delta)])
    return DesiredCurve(pose.t, states, inputs, tire_mode=tire_mode)


def quasi_static(
    spec: PathSpec,
    profile: SpeedProfile,
    model: CarModel,
    dt: float = 0.01,
    tire_mode: QuasiStaticMode = "pacejka",
    nu: float = 1e-8,
) -> DesiredCurve:
    """Quasi-static desired curve along ``spec`` at the speeds of ``profile``.

    Each sample is the cornering equilibrium at (v_d, v_d^2 sigma_d): the
    yaw rate is v_d sigma_d and the heading is the path tangent minus the
    sideslip. The front slip is zero. Equilibria are computed with the tires
    of ``model`` switched to ``tire_mode``; ``auto`` tries Pacejka tires
    first and falls back to linear tires if any sample is infeasible.

    Args:
        spec: path geometry
        profile: speed along the path
        model: car model; its kind selects load transfer or static loads
        dt: sampling step [s]
        tire_mode: pacejka, linear or auto
        nu: equilibrium residual tolerance

    Returns:
        DesiredCurve on the grid induced by ds = v dt

    Raises:
        QuasiStaticInfeasibleError: a sample has no equilibrium in the
            requested tire mode (or under linear tires in auto mode)
    """
    if tire_mode == "auto":
        try:
            return quasi_static(spec, profile, model, dt, "pacejka", nu)
        except QuasiStaticInfeasibleError as e:
            logger.warning(f"Pacejka quasi-static curve infeasible ({e}); using linear tires")
            return quasi_static(spec, profile, model, dt, "linear", nu)
    if tire_mode not in ("pacejka", "linear"):
        raise InvalidInputError(f"Unknown tire mode {tire_mode}")
    pose = path_to_pose(spec, profile, dt)
    car = model.with_tires(model.tires.with_mode(tire_mode))
    unknowns, residuals = equilibrium_samples(pose, car, nu)
    logger.debug(
        f"Quasi-static curve: {len(pose.t)} samples, {tire_mode} tires, "
        f"max residual {residuals.max():.2e}"
    )
    return _assemble(pose, unknowns, tire_mode)
