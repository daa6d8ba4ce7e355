# Copyright (c) 2025 Bytedance Ltd. and/or its affiliates
# SPDX-License-Identifier: MIT

"""
Closed-form normal loads and the well-posedness region of the load-transfer
model.

With ``D = h (mu_rx - mu_fx) - (a + b)`` the constrained system gives

    f_fz = (m g b - m g h mu_rx + I_xz psidot^2) / D
    f_rz = (m g a + m g h mu_fx - I_xz psidot^2) / D

and both loads are negative exactly when the two numerators are positive.
The numerators are used as slacks so the region stays defined at ``h = 0``.
"""

import logging

import numpy as np

from src.tire.types import Scalar
from src.utils.exceptions import IllPosedModelError

from .types import NormalLoads, VehicleParams, WellPosedness

logger = logging.getLogger(__name__)


def _slacks(mu_fx: Scalar, mu_rx: Scalar, psidot: Scalar, p: VehicleParams):
    mg = p.weight
    cross = p.I_xz * np.square(psidot)
    front = mg * p.b - mg * p.h * np.asarray(mu_rx) + cross
    rear = mg * p.a + mg * p.h * np.asarray(mu_fx) - cross
    denominator = p.h * (np.asarray(mu_rx) - np.asarray(mu_fx)) - p.wheelbase
    return front, rear, denominator


def well_posed(
    mu_fx: Scalar, mu_rx: Scalar, psidot: Scalar, p: VehicleParams
) -> WellPosedness:
    """Check both strict load inequalities.

    The margin is the smaller numerator divided by the wheelbase, i.e. the
    smaller physical load in N at the given coefficients; it is the worst
    value over all entries when arrays are passed.
    """
    front, rear, denominator = _slacks(mu_fx, mu_rx, psidot, p)
    margin = float(np.min(np.minimum(front, rear))) / p.wheelbase
    ok = bool(np.all(front > 0.0) and np.all(rear > 0.0) and np.all(denominator < 0.0))
    return WellPosedness(ok=ok, margin=margin)


def normal_loads(
    mu_fx: Scalar, mu_rx: Scalar, psidot: Scalar, p: VehicleParams
) -> NormalLoads:
    """Normal forces of the load-transfer model for given coefficients."""
    front, rear, denominator = _slacks(mu_fx, mu_rx, psidot, p)
    if not (np.all(front > 0.0) and np.all(rear > 0.0) and np.all(denominator < 0.0)):
        margin = float(np.min(np.minimum(front, rear))) / p.wheelbase
        kind = "wheelie" if np.min(front) <= 0.0 else "stoppie"
        raise IllPosedModelError(
            f"Normal load vanishes ({kind}), margin {margin:.3f} N", margin=margin
        )
    ffz = front / denominator
    frz = rear / denominator
    if np.ndim(ffz) == 0:
        return NormalLoads(ffz=float(ffz), frz=float(frz))
    return NormalLoads(ffz=ffz, frz=frz)


def static_loads(p: VehicleParams) -> NormalLoads:
    """Axle split at rest: front m g b / (a+b), rear m g a / (a+b)."""
    return NormalLoads(
        ffz=-p.weight * p.b / p.wheelbase, frz=-p.weight * p.a / p.wheelbase
    )


def equilibrium_loads(
    a_lat: Scalar, beta: Scalar, v: Scalar, p: VehicleParams
) -> NormalLoads:
    """Loads on a steady circle, expressed through the lateral acceleration."""
    psidot = np.divide(a_lat, v)
    transfer = (
        (p.I_xz + p.m * p.h * p.b) * np.square(psidot)
        + np.multiply(a_lat, p.m * p.h * np.sin(beta))
    ) / p.wheelbase
    ffz = -(p.weight * p.b / p.wheelbase + transfer)
    frz = -(p.weight * p.a / p.wheelbase - transfer)
    if np.ndim(ffz) == 0:
        return NormalLoads(ffz=float(ffz), frz=float(frz))
    return NormalLoads(ffz=ffz, frz=frz)


def wheelie_threshold(psidot: Scalar, p: VehicleParams) -> Scalar:
    """Rear coefficient mu_rx at which the front load vanishes."""
    if p.h == 0.0:
        return np.inf
    return (p.I_xz * np.square(psidot) + p.weight * p.b) / (p.weight * p.h)


def stoppie_threshold(psidot: Scalar, p: VehicleParams) -> Scalar:
    """Front coefficient mu_fx at which the rear load vanishes."""
    if p.h == 0.0:
        return -np.inf
    return (p.I_xz * np.square(psidot) - p.weight * p.a) / (p.weight * p.h)

