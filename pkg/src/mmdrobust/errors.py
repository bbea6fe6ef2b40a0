"""Exception hierarchy.

Input-shape problems raise plain :class:`ValueError`; the classes below
signal conditions specific to estimation.
"""


class MmdRobustError(Exception):
    """Base class for package-specific errors."""


class UnsupportedOperation(MmdRobustError):
    """The model does not provide the requested operation."""


class DegenerateDensity(MmdRobustError):
    """A density needed for a score evaluates to zero (or underflows)."""


class GradientDivergence(MmdRobustError):
    """A stochastic gradient became non-finite or absurdly large.

    ``state`` holds the iteration index, the current parameter and the
    offending gradient so the caller can inspect the failure.
    """

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state or {}


class ConfigError(MmdRobustError, ValueError):
    """Invalid experiment or process configuration."""
