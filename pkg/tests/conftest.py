# Copyright (c) 2025 Bytedance Ltd. and/or its affiliates
# SPDX-License-Identifier: MIT

import numpy as np
import pytest

from src.config.presets import BUILT_IN_TIRES, BUILT_IN_VEHICLES
from src.tire import TireParams, TireSet
from src.vehicle import CarModel, VehicleParams


@pytest.fixture
def sports_vehicle():
    return VehicleParams.model_validate(BUILT_IN_VEHICLES["sports"])


@pytest.fixture
def sports_tires():
    return TireSet.model_validate(BUILT_IN_TIRES["sports"])


@pytest.fixture
def rear_tire(sports_tires) -> TireParams:
    return sports_tires.rear


@pytest.fixture
def front_tire(sports_tires) -> TireParams:
    return sports_tires.front


@pytest.fixture
def car(sports_vehicle, sports_tires):
    """Load-transfer car with rear drive, as used for equilibria."""
    return CarModel(vehicle=sports_vehicle, tires=sports_tires, drive="rear")


@pytest.fixture
def awd_car(sports_vehicle, sports_tires):
    return CarModel(vehicle=sports_vehicle, tires=sports_tires, drive="all")


@pytest.fixture
def rng():
    return np.random.default_rng(0)


class LinearSystem:
    """x' = A x + B u, batched like the car model."""

    def __init__(self, A, B):
        self.A = np.asarray(A, dtype=np.float64)
        self.B = np.asarray(B, dtype=np.float64)

    def rhs(self, x, u):
        return np.asarray(x) @ self.A.T + np.asarray(u) @ self.B.T


class Pendulum:
    """Damped pendulum with a torque input; smooth and nonlinear."""

    def rhs(self, x, u):
        x = np.asarray(x)
        u = np.asarray(u)
        theta, omega = x[..., 0], x[..., 1]
        return np.stack([omega, -np.sin(theta) - 0.1 * omega + u[..., 0]], axis=-1)


@pytest.fixture
def double_integrator():
    return LinearSystem([[0.0, 1.0], [0.0, 0.0]], [[0.0], [1.0]])


@pytest.fixture
def pendulum():
    return Pendulum()
