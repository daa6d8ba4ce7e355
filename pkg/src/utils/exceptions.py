# Copyright (c) 2025 Bytedance Ltd. and/or its affiliates
# SPDX-License-Identifier: MIT

"""
Error taxonomy shared by the numerical modules and the command line.
"""

from typing import Any, Optional


class LtcarError(Exception):
    """Base class of every error raised by this package."""


class InvalidInputError(LtcarError, ValueError):
    """A numerical argument is non-finite or outside its admissible range."""


class ConfigError(LtcarError, ValueError):
    """A configuration value is missing, malformed or out of range."""

    def __init__(
        self, message: str, field: Optional[str] = None, line: Optional[int] = None
    ):
        self.field = field
        self.line = line
        location = ""
        if field:
            location += f" [field: {field}]"
        if line is not None:
            location += f" [line: {line}]"
        super().__init__(f"{message}{location}")


class NumericalError(LtcarError, ArithmeticError):
    """Base class of failures of a numerical procedure."""


class IllPosedModelError(NumericalError):
    """Normal loads cannot be determined (wheelie, stoppie or singular system)."""

    def __init__(self, message: str, margin: Optional[float] = None):
        self.margin = margin
        super().__init__(message)


class DegenerateSpeedError(NumericalError):
    """Longitudinal speed is at or below the floor where slips are defined."""


class NoConvergenceError(NumericalError):
    """A Newton iteration did not reach its tolerance."""

    def __init__(self, message: str, residual_norm: Optional[float] = None):
        self.residual_norm = residual_norm
        super().__init__(message)


class InfeasibleEquilibriumError(NoConvergenceError):
    """No cornering equilibrium was found at the requested (v, a_lat)."""


class SingularPointError(NumericalError):
    """The equilibrium Jacobian does not have a one-dimensional kernel."""


class IntegrationError(NumericalError):
    """Integration of the equations of motion failed at a given time."""

    def __init__(self, message: str, time: float, cause: Optional[Exception] = None):
        self.time = time
        self.cause = cause
        super().__init__(f"{message} at t={time:.4f} s")


class RiccatiError(NumericalError):
    """The backward Riccati sweep diverged."""

    def __init__(self, message: str, time: float):
        self.time = time
        super().__init__(f"{message} at t={time:.4f} s")


class LineSearchStall(NumericalError):
    """No step size satisfied the sufficient decrease condition."""


class QuasiStaticInfeasibleError(NumericalError):
    """A quasi-static sample has no equilibrium under the selected tire model."""

    def __init__(self, message: str, time: float):
        self.time = time
        super().__init__(f"{message} at t={time:.4f} s")


class ExplorationError(NumericalError):
    """A leg of the exploration failed; completed legs are kept on ``result``."""

    def __init__(self, message: str, result: Any = None, leg: Optional[int] = None):
        self.result = result
        self.leg = leg
        super().__init__(message)


class OutputConflictError(LtcarError, OSError):
    """An output file exists and was produced by a different configuration."""
