# Copyright (c) 2025 Bytedance Ltd. and/or its affiliates
# SPDX-License-Identifier: MIT

"""
Shared helpers: error taxonomy, runner logging and reproducible output files.
"""

from .decorators import log_io
from .exceptions import LtcarError
from .output import OutputWriter

__all__ = ["LtcarError", "OutputWriter", "log_io"]
