"""Exception hierarchy shared by the library and the command-line tool.

Each class maps to one process exit code so scripted callers can
distinguish bad invocations from bad data from numerical failures.
"""

__all__ = [
    "MipruneError",
    "InvalidParameterError",
    "InvalidDataError",
    "NumericalError",
    "TrainingError",
    "MipruneWarning",
]


class MipruneError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class InvalidParameterError(MipruneError):
    """A parameter is outside its documented domain (exit code 2)."""

    exit_code = 2


class InvalidDataError(MipruneError):
    """An input array or file violates its contract (exit code 3)."""

    exit_code = 3


class NumericalError(MipruneError):
    """A numerical routine failed to converge or produced non-finite
    values (exit code 4)."""

    exit_code = 4


class TrainingError(MipruneError):
    """Toy-model training diverged or failed to reach a usable loss."""

    exit_code = 4


class MipruneWarning(UserWarning):
    """Non-fatal condition worth surfacing (grid endpoints, fallbacks)."""
