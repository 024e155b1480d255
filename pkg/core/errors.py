"""Exception hierarchy for the simulation package.

Library errors subclass ValueError so callers that guard numeric input with
``except ValueError`` keep working.
"""

from __future__ import annotations


class SimulationError(ValueError):
    """Root of every library error."""


class InvalidParameterError(SimulationError):
    """A parameter or index lies outside its valid range."""


class InvalidStateError(SimulationError):
    """An operation was applied to a state that violates its precondition."""


class UndefinedStationaryError(SimulationError):
    """The two-state chain has no unique stationary distribution (p = q = 0)."""


class InsufficientSampleError(SimulationError):
    """Too few observations for the requested statistic."""


class UndefinedStatisticError(SimulationError):
    """The statistic is undefined for this input (zero variance, zero reference)."""


class ConfigError(SimulationError):
    """Configuration could not be parsed or validated."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class OutputDirectoryError(OSError):
    """The output directory cannot be created or written."""
