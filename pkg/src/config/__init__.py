# Copyright (c) 2025 Bytedance Ltd. and/or its affiliates
# SPDX-License-Identifier: MIT

from dotenv import load_dotenv

from .configuration import Configuration, SolverSettings
from .loader import load_yaml_config
from .presets import BUILT_IN_TIRES, BUILT_IN_VEHICLES
from .run_config import RunConfig, load_run_config

# Load environment variables
load_dotenv()

__all__ = [
    "Configuration",
    "SolverSettings",
    "RunConfig",
    "load_run_config",
    "load_yaml_config",
    "BUILT_IN_VEHICLES",
    "BUILT_IN_TIRES",
]
