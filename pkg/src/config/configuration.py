# Copyright (c) 2025 Bytedance Ltd. and/or its affiliates
# SPDX-License-Identifier: MIT

import os
from dataclasses import dataclass, fields
from typing import Any, Dict, Literal, Optional, Tuple

from src.utils.exceptions import ConfigError

ENV_PREFIX = "LTCAR_"


@dataclass(kw_only=True)
class Configuration:
    """Run-level settings. Only the output directory and the thread count can
    be overridden from the environment (LTCAR_OUTPUT_DIR, LTCAR_THREADS)."""

    output_dir: str = "output"  # Directory receiving CSV files and sidecars
    threads: int = 1  # Workers for independent branches and curve families
    force: bool = False  # Overwrite outputs written by a different config
    seed: int = 0  # Seed of randomized perturbations

    @classmethod
    def from_config(cls, config: Optional[Dict[str, Any]] = None) -> "Configuration":
        """Create a Configuration from the ``run`` section of the config file."""
        configurable = config or {}
        values: dict[str, Any] = {
            f.name: configurable.get(f.name) for f in fields(cls) if f.init
        }
        for name in ("output_dir", "threads"):
            env_value = os.environ.get(f"{ENV_PREFIX}{name.upper()}")
            if env_value:
                values[name] = env_value
        try:
            instance = cls(**{k: v for k, v in values.items() if v is not None})
            instance.threads = int(instance.threads)
            instance.seed = int(instance.seed)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"Invalid run settings: {e}", field="run") from e
        if instance.threads < 1:
            raise ConfigError("threads must be at least 1", field="run.threads")
        return instance


@dataclass(kw_only=True)
class SolverSettings:
    """Numerical settings shared by continuation and trajectory optimization."""

    dt: float = 0.01  # Sample time of curves and trajectories [s]
    nu: float = 1e-8  # Residual tolerance of the equilibrium corrector
    eps0: float = 0.05  # Initial continuation step in scaled units
    max_corrector_iter: int = 20  # Newton iterations per corrector call
    max_points: int = 2000  # Points per traced branch
    min_step: float = 1e-6  # Continuation step below which a branch stops
    delta_limit_deg: float = 90.0  # Steer magnitude ending a branch [deg]
    scale: Tuple[float, float, float, float] = (10.0, 0.1, 0.1, 0.1)
    vx_min: float = 0.5  # Longitudinal speed floor for slips [m/s]
    grad_tol: float = 1e-6  # Relative stationarity tolerance of PO-Newton
    max_iter: int = 50  # PO-Newton iterations per leg
    armijo_sigma: float = 0.4  # Sufficient decrease constant
    max_backtracks: int = 12  # Step sizes tried: 1, 1/2, ..., 2^-max_backtracks
    newton_mode: Literal["gauss-newton", "full"] = "gauss-newton"

    @classmethod
    def from_config(
        cls, config: Optional[Dict[str, Any]] = None
    ) -> "SolverSettings":
        configurable = config or {}
        known = {f.name for f in fields(cls) if f.init}
        unknown = set(configurable) - known
        if unknown:
            raise ConfigError(
                f"Unknown solver settings: {sorted(unknown)}", field="solver"
            )
        values = {k: v for k, v in configurable.items() if v is not None}
        if "scale" in values:
            values["scale"] = tuple(float(s) for s in values["scale"])
        try:
            instance = cls(**values)
        except TypeError as e:
            raise ConfigError(f"Invalid solver settings: {e}", field="solver") from e
        instance.validate()
        return instance

    def validate(self) -> None:
        positive = ("dt", "nu", "eps0", "min_step", "delta_limit_deg", "vx_min")
        for name in positive:
            if not float(getattr(self, name)) > 0.0:
                raise ConfigError(f"{name} must be positive", field=f"solver.{name}")
        for name in ("max_corrector_iter", "max_points", "max_iter"):
            if int(getattr(self, name)) < 1:
                raise ConfigError(f"{name} must be at least 1", field=f"solver.{name}")
        if len(self.scale) != 4 or min(self.scale) <= 0.0:
            raise ConfigError("scale needs 4 positive entries", field="solver.scale")
        if not 0.0 < self.armijo_sigma < 1.0:
            raise ConfigError(
                "armijo_sigma must lie in (0, 1)", field="solver.armijo_sigma"
            )
        if self.grad_tol < 0.0 or self.max_backtracks < 0:
            raise ConfigError("Stopping settings must be nonnegative", field="solver")
        if self.newton_mode not in ("gauss-newton", "full"):
            raise ConfigError(
                f"Unknown newton_mode {self.newton_mode}", field="solver.newton_mode"
            )
