# Copyright (c) 2025 Bytedance Ltd. and/or its affiliates
# SPDX-License-Identifier: MIT

"""
Schema of the run configuration file.

The file has one block per concern (vehicle, tires, solver, weights, run)
and one block per subcommand. Named parameter sets can be referenced by name
or extended with inline overrides::

    vehicle:
      preset: sports
      b: 1.6
"""

import copy
import logging
from typing import Any, Dict, List, Literal, Optional, Sequence, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from src.tire.types import TireParams, TireSet
from src.utils.exceptions import ConfigError
from src.utils.output import stable_hash
from src.vehicle.types import VehicleParams

from .configuration import Configuration, SolverSettings
from .loader import load_yaml_config, locate_key
from .presets import BUILT_IN_TIRES, BUILT_IN_VEHICLES

logger = logging.getLogger(__name__)


class _Block(BaseModel):
    model_config = ConfigDict(extra="forbid")


class GridSpec(_Block):
    start: float
    stop: float
    num: int = Field(..., ge=1)


class TireCommand(_Block):
    kappa: GridSpec = GridSpec(start=-0.5, stop=0.5, num=201)
    beta: GridSpec = GridSpec(start=-0.5, stop=0.5, num=201)
    loads: List[float] = Field(default=[2000.0, 4000.0, 6000.0], min_length=1)
    axles: List[Literal["front", "rear"]] = ["front", "rear"]
    envelope_betas: List[float] = [0.0, 0.02, 0.05, 0.1]
    linear_overlay: bool = True

    @field_validator("loads")
    @classmethod
    def _positive_loads(cls, values: List[float]) -> List[float]:
        if any(v <= 0.0 for v in values):
            raise ValueError("normal loads are magnitudes and must be positive")
        return values


class SweepSpec(_Block):
    param: Literal["b"] = "b"
    values: List[float] = Field(..., min_length=1)
    speed: float = Field(30.0, gt=0)


class EquilibriaCommand(_Block):
    speeds: List[float] = Field(default=[20.0, 30.0, 40.0], min_length=1)
    model: Literal["ltcar", "bicycle"] = "ltcar"
    tire_mode: Literal["pacejka", "linear"] = "pacejka"
    mirror: bool = False
    sweep: Optional[SweepSpec] = None
    understeer_limit: float = Field(3.0, gt=0)  # a_lat window of K_us samples

    @field_validator("speeds")
    @classmethod
    def _positive_speeds(cls, values: List[float]) -> List[float]:
        if any(v <= 0.0 for v in values):
            raise ValueError("speeds must be positive")
        return values


class EquilibriumSeed(_Block):
    v: float = Field(..., gt=0)
    a_lat: float


class SimulateCommand(_Block):
    initial_state: Dict[str, float] = {"vx": 20.0}
    inputs: Dict[str, float] = {}  # constant input when no file is given
    input_rates: Dict[str, float] = {}  # linear ramps added to the inputs
    inputs_file: Optional[str] = None
    equilibrium: Optional[EquilibriumSeed] = None
    duration: float = Field(5.0, gt=0)
    model: Literal["ltcar", "bicycle"] = "ltcar"
    drive: Literal["rear", "all"] = "all"

    @field_validator("initial_state")
    @classmethod
    def _state_names(cls, values: Dict[str, float]) -> Dict[str, float]:
        unknown = set(values) - {"x", "y", "psi", "vx", "vy", "psidot"}
        if unknown:
            raise ValueError(f"unknown state components {sorted(unknown)}")
        return values

    @field_validator("inputs", "input_rates")
    @classmethod
    def _input_names(cls, values: Dict[str, float]) -> Dict[str, float]:
        unknown = set(values) - {"delta", "kappa_r", "kappa_f"}
        if unknown:
            raise ValueError(f"unknown input components {sorted(unknown)}")
        return values


class ExploreCommand(_Block):
    track: str = "chicane"  # built-in name or path of a segment file
    waypoints: Optional[List[List[float]]] = None
    speed: Optional[float] = Field(None, gt=0)  # constant speed override
    schedule: Literal["aggressiveness", "speed", "single"] = "aggressiveness"
    schedule_values: Optional[List[float]] = None
    tire_mode: Literal["pacejka", "linear", "auto"] = "auto"
    model: Literal["ltcar", "bicycle"] = "ltcar"
    compare_bicycle: bool = False
    external_curve: Optional[str] = None


class WeightsSpec(_Block):
    Q: List[float] = Field(default=[10.0, 10.0, 1.0, 1.0, 1.0, 1.0])
    R: List[float] = Field(default=[0.1, 0.1, 0.1])
    P1: Optional[List[float]] = None
    Q_K: Optional[List[float]] = None
    R_K: Optional[List[float]] = None

    @field_validator("Q", "P1", "Q_K")
    @classmethod
    def _state_diagonal(cls, values: Optional[List[float]]):
        if values is not None and (len(values) != 6 or min(values) < 0.0):
            raise ValueError("state weights need 6 nonnegative diagonal entries")
        return values

    @field_validator("R", "R_K")
    @classmethod
    def _input_diagonal(cls, values: Optional[List[float]]):
        if values is not None and (len(values) != 3 or min(values) <= 0.0):
            raise ValueError("input weights need 3 positive diagonal entries")
        return values


class RunConfig(_Block):
    """The whole configuration file, validated."""

    vehicle: Union[str, Dict[str, Any]] = "sports"
    tires: Union[str, Dict[str, Any]] = "sports"
    solver: Dict[str, Any] = {}
    run: Dict[str, Any] = {}
    weights: WeightsSpec = WeightsSpec()
    tire: TireCommand = TireCommand()
    equilibria: EquilibriaCommand = EquilibriaCommand()
    simulate: SimulateCommand = SimulateCommand()
    explore: ExploreCommand = ExploreCommand()

    def vehicle_params(self) -> VehicleParams:
        values = _resolve_preset(self.vehicle, BUILT_IN_VEHICLES, "vehicle")
        return _build(VehicleParams, values, "vehicle")

    def tire_set(self) -> TireSet:
        if isinstance(self.tires, str):
            spec: Dict[str, Any] = {"preset": self.tires}
        else:
            spec = dict(self.tires)
        name = spec.pop("preset", "sports")
        if name not in BUILT_IN_TIRES:
            raise ConfigError(f"Unknown tire set '{name}'", field="tires.preset")
        base = copy.deepcopy(BUILT_IN_TIRES[name])
        for axle in ("front", "rear"):
            base[axle].update(spec.pop(axle, None) or {})
            _build(TireParams, base[axle], f"tires.{axle}")
        return _build(TireSet, {**base, **spec}, "tires")

    def solver_settings(self) -> SolverSettings:
        return SolverSettings.from_config(self.solver)

    def configuration(self) -> Configuration:
        return Configuration.from_config(self.run)

    def config_hash(self) -> str:
        return stable_hash(self.model_dump(mode="json"))


def _resolve_preset(
    spec: Union[str, Dict[str, Any]], presets: Dict[str, dict], field: str
) -> Dict[str, Any]:
    if isinstance(spec, str):
        spec = {"preset": spec}
    values = dict(spec)
    name = values.pop("preset", None)
    if name is None:
        return values
    if name not in presets:
        raise ConfigError(
            f"Unknown {field} set '{name}', expected one of {sorted(presets)}",
            field=f"{field}.preset",
        )
    return {**presets[name], **values}


def _build(model: type[BaseModel], values: Dict[str, Any], field: str):
    try:
        return model.model_validate(values)
    except ValidationError as e:
        error = e.errors()[0]
        path = ".".join([field, *(str(p) for p in error["loc"])])
        raise ConfigError(f"{error['msg']}", field=path) from e


def _merge(base: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    merged = dict(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_run_config(
    path: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None
) -> RunConfig:
    """Read, merge command-line overrides into, and validate a config file.

    Args:
        path: YAML file; a missing path means all defaults
        overrides: nested mapping that wins over the file contents

    Returns:
        The validated RunConfig
    """
    try:
        raw = load_yaml_config(path) if path else {}
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        raise ConfigError(
            f"Malformed YAML in {path}: {getattr(e, 'problem', None) or e}",
            line=mark.line + 1 if mark is not None else None,
        ) from e
    merged = _merge(raw, overrides or {})
    try:
        config = RunConfig.model_validate(merged)
        # named sets and solver ranges are checked eagerly
        config.vehicle_params()
        config.tire_set()
        config.solver_settings()
        config.configuration()
    except ValidationError as e:
        error = e.errors()[0]
        loc: Sequence[Any] = error["loc"]
        raise ConfigError(
            error["msg"],
            field=".".join(str(p) for p in loc),
            line=locate_key(path, loc) if path else None,
        ) from e
    except ConfigError as e:
        if e.line is None and path and e.field:
            parts = [int(p) if p.isdigit() else p for p in e.field.split(".")]
            raise ConfigError(
                str(e).split(" [field:")[0],
                field=e.field,
                line=locate_key(path, parts),
            ) from e
        raise
    logger.debug(f"Loaded configuration from {path or 'defaults'}")
    return config
