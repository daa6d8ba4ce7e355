# Copyright (c) 2025 Bytedance Ltd. and/or its affiliates
# SPDX-License-Identifier: MIT

"""
Magic-formula friction coefficients, combined-slip losses and the linear tire.

All functions accept scalars or numpy arrays and broadcast; scalar inputs
give a Python float back.
"""

from typing import Optional, Sequence

import numpy as np
import pandas as pd

from src.utils.exceptions import InvalidInputError

from .types import FloatArray, FrictionPair, Scalar, SlipState, TireMode, TireParams


def _as_array(name: str, value: Scalar) -> FloatArray:
    array = np.asarray(value, dtype=np.float64)
    if not np.all(np.isfinite(array)):
        raise InvalidInputError(f"{name} must be finite, got {value}")
    return array


def _result(value: FloatArray, *inputs: Scalar) -> Scalar:
    if all(np.isscalar(x) or np.ndim(x) == 0 for x in inputs):
        return float(np.asarray(value).item())
    return np.asarray(value, dtype=np.float64)


def magic_formula(slip: FloatArray, b: float, c: float, d: float, e: float):
    bs = b * slip
    return d * np.sin(c * np.arctan(bs - e * (bs - np.arctan(bs))))


def pure_longitudinal(kappa: Scalar, p: TireParams) -> Scalar:
    """Pure longitudinal coefficient f_x0(kappa); odd, bounded by d_x."""
    k = _as_array("kappa", kappa)
    return _result(magic_formula(k, p.b_x, p.c_x, p.d_x, p.e_x), kappa)


def pure_lateral(beta: Scalar, p: TireParams) -> Scalar:
    """Pure lateral coefficient f_y0(beta); odd, bounded by d_y."""
    s = _as_array("beta", beta)
    return _result(magic_formula(s, p.b_y, p.c_y, p.d_y, p.e_y), beta)


def loss_longitudinal(kappa: Scalar, beta: Scalar, p: TireParams) -> Scalar:
    """Combined-slip loss g_xb applied to the longitudinal coefficient."""
    k = _as_array("kappa", kappa)
    s = _as_array("beta", beta)
    g = np.cos(p.c_xb * np.arctan(s * p.r_bx1 / (1.0 + p.r_bx2**2 * k**2)))
    return _result(g, kappa, beta)


def loss_lateral(kappa: Scalar, beta: Scalar, p: TireParams) -> Scalar:
    """Combined-slip loss g_yk applied to the lateral coefficient."""
    k = _as_array("kappa", kappa)
    s = _as_array("beta", beta)
    g = np.cos(p.c_yk * np.arctan(k * p.r_by1 / (1.0 + p.r_by2**2 * s**2)))
    return _result(g, kappa, beta)


def combined(slip: SlipState, p: TireParams) -> FrictionPair:
    """Combined-slip friction pair in the tire frame."""
    mu_x = np.multiply(
        pure_longitudinal(slip.kappa, p), loss_longitudinal(slip.kappa, slip.beta, p)
    )
    mu_y = np.multiply(
        pure_lateral(slip.beta, p), loss_lateral(slip.kappa, slip.beta, p)
    )
    return FrictionPair(
        mu_x=_result(mu_x, slip.kappa, slip.beta),
        mu_y=_result(mu_y, slip.kappa, slip.beta),
    )


def steered_frame(pair: FrictionPair, delta: Scalar) -> FrictionPair:
    """Rotate a tire-frame pair by the steer angle into the body frame."""
    d = _as_array("delta", delta)
    cos_d, sin_d = np.cos(d), np.sin(d)
    mu_x = pair.mu_x * cos_d - pair.mu_y * sin_d
    mu_y = pair.mu_x * sin_d + pair.mu_y * cos_d
    return FrictionPair(
        mu_x=_result(mu_x, pair.mu_x, pair.mu_y, delta),
        mu_y=_result(mu_y, pair.mu_x, pair.mu_y, delta),
    )


def cornering_stiffness(p: TireParams) -> float:
    return p.d_y * p.c_y * p.b_y


def longitudinal_stiffness(p: TireParams) -> float:
    return p.d_x * p.c_x * p.b_x


def linear_lateral(beta: Scalar, stiffness: float) -> Scalar:
    """Unsaturated lateral coefficient stiffness * beta."""
    return _result(stiffness * _as_array("beta", beta), beta)


def linear_longitudinal(kappa: Scalar, stiffness: float) -> Scalar:
    """Unsaturated longitudinal coefficient stiffness * kappa."""
    return _result(stiffness * _as_array("kappa", kappa), kappa)


def tire_coefficients(
    slip: SlipState,
    p: TireParams,
    mode: TireMode = "pacejka",
    lat_stiffness: Optional[float] = None,
    lon_stiffness: Optional[float] = None,
) -> FrictionPair:
    """Tire-frame coefficients of one axle under the selected tire model."""
    if mode == "pacejka":
        return combined(slip, p)
    if mode != "linear":
        raise InvalidInputError(f"Unknown tire mode: {mode}")
    c_y = lat_stiffness if lat_stiffness is not None else cornering_stiffness(p)
    c_x = lon_stiffness if lon_stiffness is not None else longitudinal_stiffness(p)
    return FrictionPair(
        mu_x=linear_longitudinal(slip.kappa, c_x),
        mu_y=linear_lateral(slip.beta, c_y),
    )


def force_envelope(
    kappa_grid: Sequence[float], betas: Sequence[float], p: TireParams, load: float
) -> pd.DataFrame:
    """Combined-slip forces along a kappa sweep at fixed sideslips.

    ``load`` is the normal load magnitude in N. The columns ``fx_max`` and
    ``fy_max`` give the semi-axes of the friction ellipse at that load.
    """
    kappa = _as_array("kappa_grid", kappa_grid)
    if kappa.size == 0 or len(betas) == 0:
        raise InvalidInputError("Envelope sweep needs a non-empty grid")
    rows = []
    for beta in betas:
        pair = combined(SlipState(kappa=kappa, beta=np.full_like(kappa, beta)), p)
        rows.append(
            pd.DataFrame(
                {
                    "beta": beta,
                    "kappa": kappa,
                    "fz": load,
                    "fx": load * np.asarray(pair.mu_x),
                    "fy": load * np.asarray(pair.mu_y),
                    "fx_max": load * p.d_x,
                    "fy_max": load * p.d_y,
                }
            )
        )
    return pd.concat(rows, ignore_index=True)
