"""Exception hierarchy shared across the engine.

Domain errors on plain numeric preconditions (empty input, temperature <= 0,
bad targets) raise builtin ValueError; the classes here cover artifact-level
failures that callers dispatch on.
"""

from __future__ import annotations


class SelpredError(Exception):
    """Base class for engine errors."""


class ParseError(SelpredError):
    """A record line could not be decoded. Carries the 1-based line number."""

    def __init__(self, message: str, line_number: int | None = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class ValidationError(SelpredError):
    """A decoded record or manifest violates a schema invariant."""


class IntegrityError(SelpredError):
    """A run directory is internally inconsistent (counts, duplicate order)."""


class ConfigurationError(SelpredError):
    """A requested signal, variant, or config value is unusable."""


class DegenerateInputError(SelpredError):
    """A metric is undefined on this input (e.g. single-class labels)."""


class StatisticsError(SelpredError):
    """A statistical procedure produced no usable replicates."""
