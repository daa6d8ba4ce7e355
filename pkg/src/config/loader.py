# Copyright (c) 2025 Bytedance Ltd. and/or its affiliates
# SPDX-License-Identifier: MIT

import os
from typing import Any, Dict, Optional, Sequence

import yaml

from src.utils.exceptions import ConfigError


def replace_env_vars(value: str) -> str:
    """Replace environment variables in string values."""
    if not isinstance(value, str):
        return value
    if value.startswith("$"):
        env_var = value[1:]
        return os.getenv(env_var, value)
    return value


def process_value(value: Any) -> Any:
    if isinstance(value, dict):
        return process_dict(value)
    if isinstance(value, list):
        return [process_value(item) for item in value]
    if isinstance(value, str):
        return replace_env_vars(value)
    return value


def process_dict(config: Dict[str, Any]) -> Dict[str, Any]:
    """Recursively process dictionary to replace environment variables."""
    return {key: process_value(value) for key, value in config.items()}


_config_cache: Dict[str, Dict[str, Any]] = {}


def load_yaml_config(file_path: str) -> Dict[str, Any]:
    """Load and process YAML configuration file."""
    # missing file means an empty configuration
    if not os.path.exists(file_path):
        return {}

    if file_path in _config_cache:
        return _config_cache[file_path]

    with open(file_path, "r") as f:
        config = yaml.safe_load(f) or {}
    if not isinstance(config, dict):
        raise ConfigError(f"Top level of {file_path} must be a mapping", line=1)
    processed_config = process_dict(config)

    _config_cache[file_path] = processed_config
    return processed_config


def clear_config_cache() -> None:
    _config_cache.clear()


def locate_key(file_path: str, path: Sequence[Any]) -> Optional[int]:
    """1-based line of the deepest existing key along ``path`` in a YAML file."""
    if not file_path or not os.path.exists(file_path):
        return None
    with open(file_path, "r") as f:
        try:
            node = yaml.compose(f)
        except yaml.YAMLError:
            return None
    line = None
    for part in path:
        if isinstance(node, yaml.MappingNode):
            match = next(
                ((k, v) for k, v in node.value if k.value == str(part)), None
            )
            if match is None:
                break
            line = match[0].start_mark.line + 1
            node = match[1]
        elif isinstance(node, yaml.SequenceNode) and isinstance(part, int):
            if part >= len(node.value):
                break
            node = node.value[part]
            line = node.start_mark.line + 1
        else:
            break
    return line
