# Copyright (c) 2025 Bytedance Ltd. and/or its affiliates
# SPDX-License-Identifier: MIT

import numpy as np
import pytest

from src.explore import (
    SpeedProfile,
    arc,
    initial_trajectory,
    path_from_segments,
    position_rms,
    quasi_static,
    ramp,
    straight,
)
from src.manifold import solve_point
from src.trajopt import (
    Curve,
    Weights,
    cost,
    cost_gradient,
    design_gain,
    directional_derivative,
    integrate,
    linearize_step,
    po_newton,
    project,
    tangent_from_inputs,
    trajectory_report,
)


@pytest.fixture
def bend_curve(car):
    segments = [straight(30.0), ramp(20.0, 0.0, 0.01), arc(30.0, 0.01)]
    path = path_from_segments(segments)
    return quasi_static(path, SpeedProfile.constant(20.0, path.length), car, dt=0.02)


def test_equilibrium_inputs_drive_a_circle(car):
    """Test that held equilibrium inputs trace a circle of radius v^2 / a_lat"""
    point = solve_point(20.0, 4.0, car)
    n = 201
    inputs = np.tile(point.car_input().as_array(), (n, 1))
    traj = integrate(point.state().as_array(), inputs, car, 0.025)
    radius = 20.0**2 / 4.0
    chi = point.unknowns.beta
    center = np.array([-radius * np.sin(chi), radius * np.cos(chi)])
    distance = np.linalg.norm(traj.states[:, :2] - center, axis=1)
    np.testing.assert_allclose(distance, radius, rtol=1e-3)
    np.testing.assert_allclose(traj.states[:, 5], 0.2, atol=1e-5)
    report = trajectory_report(car, traj)
    np.testing.assert_allclose(report["load_sum"], 1480.0 * 9.81, rtol=1e-9)
    np.testing.assert_allclose(report["a_lat"], 4.0, rtol=1e-3)


def test_quasi_static_curve_is_close_to_a_trajectory(car, bend_curve):
    """Test that projecting the quasi-static curve barely moves it"""
    traj = initial_trajectory(bend_curve, Weights.diagonal(), car)
    assert traj.defect(car) <= 1e-10
    assert position_rms(traj, bend_curve) < 0.5
    np.testing.assert_allclose(traj.states[:, 3], bend_curve.states[:, 3], atol=0.5)


@pytest.mark.parametrize("mode", ["gauss-newton", "full"])
def test_po_newton_on_quasi_static_curve(car, bend_curve, mode):
    """Test monotone cost decrease toward the quasi-static curve"""
    weights = Weights.diagonal()
    start = initial_trajectory(bend_curve, weights, car)
    result = po_newton(start, bend_curve, weights, car, max_iter=8, mode=mode)
    costs = result.costs
    assert costs[0] == pytest.approx(cost(start, bend_curve, weights))
    assert all(b <= a for a, b in zip(costs, costs[1:]))
    assert result.cost <= costs[0]
    assert result.status in ("converged", "max_iter", "stall")
    traj, log = result
    assert traj.defect(car) <= 1e-10
    assert [record["iter"] for record in log] == list(range(len(log)))


def test_adjoint_gradient_matches_projected_differences(car, bend_curve, rng):
    """Test Dg.zeta on tangent vectors against differences of g(P(xi + gamma zeta))"""
    weights = Weights.diagonal()
    K = design_gain(bend_curve, weights, car)
    xi = project(bend_curve, K, car)
    lin = linearize_step(car, xi)
    grad = cost_gradient(xi, bend_curve, weights, lin)
    h = 1e-3

    def projected_cost(zeta, gamma):
        moved = xi.shifted(zeta.states, zeta.inputs, gamma)
        return cost(project(moved, K, car), bend_curve, weights)

    for _ in range(10):
        zeta_u = 1e-3 * rng.standard_normal(xi.inputs.shape)
        zeta = Curve(xi.times, tangent_from_inputs(zeta_u, lin), zeta_u)
        slope = directional_derivative(zeta, xi, bend_curve, weights)
        difference = (projected_cost(zeta, h) - projected_cost(zeta, -h)) / (2.0 * h)
        assert float(np.sum(grad * zeta_u)) == pytest.approx(slope, rel=1e-8, abs=1e-12)
        assert slope == pytest.approx(difference, rel=1e-4, abs=1e-8)
