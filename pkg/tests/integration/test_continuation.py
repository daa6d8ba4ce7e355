# Copyright (c) 2025 Bytedance Ltd. and/or its affiliates
# SPDX-License-Identifier: MIT

import numpy as np
import pytest

from src.config.presets import BUILT_IN_TIRES, BUILT_IN_VEHICLES
from src.manifold import (
    ORIGIN,
    jacobian,
    sweep_parameter,
    trace_branch,
    trace_speeds,
    understeer_gradient,
)
from src.manifold.continuation import DEFAULT_SCALE
from src.tire import TireSet
from src.vehicle import CarModel, VehicleParams, dynamics_vbeta

SCALE = np.array(DEFAULT_SCALE)


@pytest.fixture(scope="module")
def model():
    return CarModel(
        vehicle=VehicleParams.model_validate(BUILT_IN_VEHICLES["sports"]),
        tires=TireSet.model_validate(BUILT_IN_TIRES["sports"]),
        drive="rear",
    )


@pytest.fixture(scope="module")
def branch30(model):
    return trace_branch(ORIGIN, 30.0, model, max_points=800)


def test_branch_points_are_equilibria(branch30):
    """Test the residual of every accepted point"""
    frame = branch30.to_frame()
    assert len(frame) > 50
    assert frame["residual_norm"].max() <= 1e-8
    assert np.all(np.diff(frame["arclength"]) > 0.0)


def test_tangents_span_the_kernel(branch30, model):
    """Test stored tangents against the Jacobian and their orientation"""
    for point in branch30.points[::25]:
        J = jacobian(point.unknowns.as_array(), 30.0, model)
        assert np.linalg.norm(J @ point.tangent) <= 1e-6 * np.linalg.norm(J)
    scaled = branch30.tangents() / SCALE
    assert np.all(np.einsum("ki,ki->k", scaled[:-1], scaled[1:]) > 0.0)


def test_branch_folds_at_peak_lateral_acceleration(branch30):
    """Test that the branch turns back with a second steer solution"""
    folds = branch30.fold_indices()
    assert folds
    x = branch30.unknowns()
    fold = folds[0]
    peak = x[fold, 0]
    assert 8.0 < peak <= 1.688 * 9.81
    assert peak == pytest.approx(branch30.max_lateral_acceleration(), rel=2e-2)
    before, after = x[: fold + 1], x[fold + 1 :]
    below = after[(after[:, 0] < 0.95 * peak) & (after[:, 0] > before[1, 0])]
    assert below.size
    a, delta = below[0, 0], below[0, 2]
    assert abs(delta - np.interp(a, before[:, 0], before[:, 2])) > 1e-4


def test_equilibria_are_stationary_under_the_dynamics(branch30, model):
    """Test equilibrium points against the speed-sideslip equations"""
    for point in branch30.points[:: max(1, len(branch30) // 20)]:
        d, _ = dynamics_vbeta(
            point.state(), point.car_input(), model.vehicle, model.tires
        )
        assert np.linalg.norm(d) <= 1e-6


def test_mirrored_branch(model):
    """Test that the negated tangent traces the point-mirrored branch"""
    positive = trace_branch(ORIGIN, 30.0, model, max_points=80)
    negative = trace_branch(ORIGIN, 30.0, model, max_points=80, orientation=-1)
    mirror = positive.unknowns() * np.array([-1.0, -1.0, -1.0, 1.0])
    np.testing.assert_allclose(negative.unknowns(), mirror, atol=1e-7)


def test_sports_car_oversteers(model):
    """Test a negative understeer gradient at low lateral acceleration"""
    branches = trace_speeds([20.0, 30.0, 40.0], model, threads=3, max_points=80)
    assert [b.v for b in branches] == [20.0, 30.0, 40.0]
    for branch in branches:
        k_us = understeer_gradient(branch, a_lat_max=3.0)
        assert len(k_us) >= 2
        assert np.all(k_us.to_numpy() < 0.0)


def test_understeer_window_past_fold_is_rejected(branch30):
    """Test that a window reaching past the fold is refused"""
    with pytest.raises(ValueError, match="spans the fold"):
        understeer_gradient(branch30, a_lat_max=50.0)


def test_branch_summary(branch30):
    """Test the branch summary record"""
    summary = branch30.summary()
    assert summary["points"] == len(branch30)
    assert summary["fold"]["index"] == branch30.fold_indices()[0]
    assert summary["max_a_lat"] == pytest.approx(branch30.max_lateral_acceleration())


@pytest.mark.slow
def test_rearward_mass_counter_steers(model):
    """Test counter-steering equilibria with the mass far forward of the rear axle"""
    (branch,) = sweep_parameter("b", [2.1], 30.0, model, max_points=2000)
    assert branch.label["value"] == 2.1
    assert branch.counter_steer_points()
    assert branch.summary()["counter_steering"] is True


def test_nominal_mass_position_never_counter_steers(branch30):
    """Test that the rear-heavy nominal car steers into the turn on its whole branch"""
    assert branch30.fold_indices()
    assert branch30.counter_steer_points() == []
    assert branch30.summary()["counter_steering"] is False
