# Copyright (c) 2025 Bytedance Ltd. and/or its affiliates
# SPDX-License-Identifier: MIT

import functools
import logging
import time
from typing import Any, Callable

logger = logging.getLogger(__name__)


def _short(value: Any, limit: int = 200) -> str:
    text = str(value)
    return text if len(text) <= limit else text[: limit - 3] + "..."


def log_io(func: Callable) -> Callable:
    """
    A decorator that logs the input parameters, the output and the wall time
    of a command runner.

    Args:
        func: The runner to be decorated

    Returns:
        The wrapped function with input/output logging
    """

    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        func_name = func.__name__
        params = ", ".join(
            [
                *(_short(arg) for arg in args),
                *(f"{k}={_short(v)}" for k, v in kwargs.items()),
            ]
        )
        logger.info(f"Command {func_name} called with parameters: {params}")

        start = time.perf_counter()
        result = func(*args, **kwargs)
        elapsed = time.perf_counter() - start

        logger.info(
            f"Command {func_name} finished in {elapsed:.2f} s: {_short(result)}"
        )
        return result

    return wrapper
