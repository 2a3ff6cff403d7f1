"""Shared exception types.

ValueError is used for malformed inputs (bad shapes, non-finite data,
violated preconditions). The classes below cover the remaining failure
modes that callers may want to distinguish.
"""


class NumericalError(RuntimeError):
    """An iterative numerical routine failed to converge or broke down."""


class InfeasibleError(NumericalError):
    """A constraint set turned out to be empty within tolerance."""


class ConfigError(ValueError):
    """A run configuration (CLI flags or config file) is invalid."""
