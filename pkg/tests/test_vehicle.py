# Copyright (c) 2025 Bytedance Ltd. and/or its affiliates
# SPDX-License-Identifier: MIT

import numpy as np
import pytest

from src.utils.exceptions import DegenerateSpeedError, IllPosedModelError, InvalidInputError
from src.vehicle import (
    BodyCoefficients,
    CarInput,
    CarModel,
    CarState,
    bicycle_dynamics,
    contact_slips,
    dynamics_vbeta,
    dynamics_vxvy,
    equilibrium_loads,
    full_dynamics,
    lateral_acceleration,
    normal_loads,
    static_loads,
    stoppie_threshold,
    well_posed,
    wheelie_threshold,
)
from src.vehicle.dynamics import _solve, _system_vxvy


def _random_states(rng, count):
    state = CarState(
        x=rng.uniform(-50, 50, count),
        y=rng.uniform(-50, 50, count),
        psi=rng.uniform(-np.pi, np.pi, count),
        vx=rng.uniform(10.0, 40.0, count),
        vy=rng.uniform(-2.0, 2.0, count),
        psidot=rng.uniform(-0.6, 0.6, count),
    )
    inputs = CarInput(
        delta=rng.uniform(-0.1, 0.1, count),
        kappa_r=rng.uniform(-0.1, 0.1, count),
        kappa_f=rng.uniform(-0.05, 0.05, count),
    )
    return state, inputs


def test_static_loads_oracle(sports_vehicle):
    """Test the static axle split of the sports car"""
    loads = static_loads(sports_vehicle)
    assert loads.ffz == pytest.approx(-6097.896, rel=1e-9)
    assert loads.frz == pytest.approx(-8420.904, rel=1e-9)
    assert loads.total == pytest.approx(1480.0 * 9.81, rel=1e-12)


def test_contact_slips_oracle(sports_vehicle):
    """Test rear and front sideslip angles at a known state"""
    state = CarState(x=0.0, y=0.0, psi=0.0, vx=30.0, vy=1.0, psidot=0.2)
    rear, front = contact_slips(state, CarInput(delta=0.05, kappa_r=0.0), sports_vehicle)
    assert rear.beta == pytest.approx(0.033320995878247196, rel=1e-12)
    assert front.beta == pytest.approx(-0.00037411187191457862, rel=1e-9)
    assert front.delta == 0.05


def test_degenerate_speed(sports_vehicle):
    """Test that slips are refused at or below the speed floor"""
    state = CarState(x=0.0, y=0.0, psi=0.0, vx=0.5, vy=0.0, psidot=0.0)
    with pytest.raises(DegenerateSpeedError, match="floor"):
        contact_slips(state, CarInput(delta=0.0, kappa_r=0.0), sports_vehicle)


def test_chart_equivalence(rng, sports_vehicle, sports_tires):
    """Test that the (vx, vy) and (v, beta) systems agree under the chart change"""
    state, inputs = _random_states(rng, 1000)
    d_xy, loads_xy = dynamics_vxvy(state, inputs, sports_vehicle, sports_tires)
    d_vb, loads_vb = dynamics_vbeta(state, inputs, sports_vehicle, sports_tires)
    vx, vy, v = state.vx, state.vy, state.v
    v_dot = (vx * d_xy[:, 0] + vy * d_xy[:, 1]) / v
    beta_dot = (vx * d_xy[:, 1] - vy * d_xy[:, 0]) / v**2
    np.testing.assert_allclose(d_vb[:, 0], v_dot, rtol=1e-9, atol=1e-9)
    np.testing.assert_allclose(d_vb[:, 1], beta_dot, rtol=1e-9, atol=1e-9)
    np.testing.assert_allclose(d_vb[:, 2], d_xy[:, 2], rtol=1e-9, atol=1e-9)
    np.testing.assert_allclose(loads_vb.ffz, loads_xy.ffz, rtol=1e-9)


def test_load_sum_is_weight(rng, sports_vehicle, sports_tires):
    """Test that the normal loads always carry the weight"""
    state, inputs = _random_states(rng, 1000)
    _, loads = dynamics_vxvy(state, inputs, sports_vehicle, sports_tires)
    np.testing.assert_allclose(loads.total, sports_vehicle.weight, rtol=1e-9)
    assert np.all(loads.ffz < 0.0) and np.all(loads.frz < 0.0)


def test_bicycle_reduction(rng, sports_vehicle, sports_tires):
    """Test that without height and cross inertia the model is the bicycle"""
    flat = sports_vehicle.model_copy(update={"h": 0.0, "I_xz": 0.0})
    state, inputs = _random_states(rng, 1000)
    full = full_dynamics(state, inputs, flat, sports_tires)
    reduced = bicycle_dynamics(state, inputs, flat, sports_tires)
    np.testing.assert_allclose(full, reduced, rtol=1e-9, atol=1e-9)


def test_car_model_matches_functions(rng, sports_vehicle, sports_tires):
    """Test that the batched array model equals the structured functions"""
    model = CarModel(vehicle=sports_vehicle, tires=sports_tires, drive="all")
    state, inputs = _random_states(rng, 50)
    expected = full_dynamics(state, inputs, sports_vehicle, sports_tires)
    np.testing.assert_allclose(
        model.rhs(state.as_array(), inputs.as_array()), expected, rtol=1e-12
    )
    single = model.rhs(state.as_array()[3], inputs.as_array()[3])
    np.testing.assert_allclose(single, expected[3], rtol=1e-12)


def test_rear_drive_ignores_front_slip(car):
    """Test that a rear-driven car holds the front slip at zero"""
    x = np.array([0.0, 0.0, 0.0, 25.0, 0.3, 0.1])
    a = car.rhs(x, np.array([0.02, 0.05, 0.0]))
    b = car.rhs(x, np.array([0.02, 0.05, 0.3]))
    np.testing.assert_array_equal(a, b)


def test_kinematics_rows(car):
    """Test the pose derivative of the rear contact point"""
    x = np.array([1.0, 2.0, 0.5, 20.0, 1.0, 0.2])
    d = car.rhs(x, np.zeros(3))
    assert d[0] == pytest.approx(20.0 * np.cos(0.5) - 1.0 * np.sin(0.5))
    assert d[1] == pytest.approx(20.0 * np.sin(0.5) + 1.0 * np.cos(0.5))
    assert d[2] == 0.2


def test_straight_coasting_is_steady(car):
    """Test that zero inputs on a straight keep the speed"""
    x = np.array([0.0, 0.0, 0.0, 20.0, 0.0, 0.0])
    d = car.rhs(x, np.zeros(3))
    np.testing.assert_allclose(d[3:], 0.0, atol=1e-12)


def test_ill_posed_loads(sports_vehicle):
    """Test wheelie and stoppie detection"""
    threshold = wheelie_threshold(0.0, sports_vehicle)
    assert threshold == pytest.approx(1.029 / 0.42)
    assert well_posed(0.0, threshold - 0.01, 0.0, sports_vehicle)
    assert not well_posed(0.0, threshold + 0.01, 0.0, sports_vehicle)
    with pytest.raises(IllPosedModelError, match="wheelie"):
        normal_loads(0.0, threshold + 0.01, 0.0, sports_vehicle)
    with pytest.raises(IllPosedModelError, match="stoppie"):
        normal_loads(stoppie_threshold(0.0, sports_vehicle) - 0.01, 0.0, 0.0, sports_vehicle)


def test_flat_car_is_always_well_posed(sports_vehicle):
    """Test the multiplied-out conditions at zero height"""
    flat = sports_vehicle.model_copy(update={"h": 0.0})
    assert wheelie_threshold(0.3, flat) == np.inf
    assert well_posed(1.6, 1.6, 0.3, flat)


def test_well_posedness_agrees_with_the_solvers(rng, sports_vehicle):
    """Test the closed-form check against the raising loads and the 5x5 solve"""
    p = sports_vehicle
    outcomes = []
    for mu_fx in np.linspace(-4.1, 1.3, 10):
        for mu_rx in np.linspace(-1.3, 3.7, 10):
            for psidot in (0.0, 0.45, 0.9):
                check = well_posed(mu_fx, mu_rx, psidot, p)
                outcomes.append(bool(check))
                if not check:
                    with pytest.raises(IllPosedModelError):
                        normal_loads(mu_fx, mu_rx, psidot, p)
                    front_up = mu_rx >= wheelie_threshold(psidot, p)
                    rear_up = mu_fx <= stoppie_threshold(psidot, p)
                    if front_up == rear_up:
                        continue
                mu = BodyCoefficients(
                    mu_fx=mu_fx,
                    mu_fy=rng.uniform(-1, 1),
                    mu_rx=mu_rx,
                    mu_ry=rng.uniform(-1, 1),
                )
                z = _solve(*_system_vxvy(20.0, -0.5, psidot, mu, p))
                if check:
                    loads = normal_loads(mu_fx, mu_rx, psidot, p)
                    assert check.margin > 0.0
                    np.testing.assert_allclose(z[3:], [loads.ffz, loads.frz], rtol=1e-9)
                else:
                    # one axle lifts off: its solved load changes sign
                    assert max(z[3], z[4]) > 0.0
    assert any(outcomes) and not all(outcomes)


def test_mirrored_state_mirrors_the_motion(rng, awd_car):
    """Test that flipping the lateral variables flips the lateral derivatives"""
    state, inputs = _random_states(rng, 40)
    x, u = state.as_array(), inputs.as_array()
    flip_x = np.array([1.0, -1.0, -1.0, 1.0, -1.0, -1.0])
    flip_u = np.array([-1.0, 1.0, 1.0])
    d = awd_car.rhs(x, u)
    mirrored = awd_car.rhs(x * flip_x, u * flip_u)
    np.testing.assert_allclose(mirrored, d * flip_x, rtol=1e-10, atol=1e-10)
    loads = awd_car.loads(x, u)
    flipped = awd_car.loads(x * flip_x, u * flip_u)
    np.testing.assert_allclose(flipped.ffz, loads.ffz, rtol=1e-9)


def test_equilibrium_loads_reduce_to_static(sports_vehicle):
    """Test steady-turn loads at zero lateral acceleration"""
    loads = equilibrium_loads(0.0, 0.0, 30.0, sports_vehicle)
    static = static_loads(sports_vehicle)
    assert loads.ffz == pytest.approx(static.ffz)
    assert loads.frz == pytest.approx(static.frz)


def test_lateral_acceleration_of_steady_turn():
    """Test a_lat = v psidot when velocities are constant"""
    state = np.array([0.0, 0.0, 0.0, 29.0, 2.0, 0.3])
    derivative = np.zeros(6)
    assert lateral_acceleration(state, derivative) == pytest.approx(np.hypot(29.0, 2.0) * 0.3)


def test_with_com_keeps_wheelbase(sports_vehicle):
    """Test moving the center of mass"""
    moved = sports_vehicle.with_com(2.1)
    assert moved.wheelbase == pytest.approx(2.45)
    assert moved.a == pytest.approx(0.35)
    with pytest.raises(InvalidInputError, match="inside the wheelbase"):
        sports_vehicle.with_com(2.45)


def test_invalid_input_slip():
    """Test that a longitudinal slip at -1 is rejected"""
    with pytest.raises(InvalidInputError, match="greater than -1"):
        CarInput(delta=0.0, kappa_r=-1.0)
