"""
Error types raised by the laboratory.

Parameter validation on models raises pydantic's ``ValidationError``; the
classes below cover the numerical and contract failures of the tools.
"""


class LabError(Exception):
    """Base class for all laboratory errors."""


class ParameterDomainError(LabError, ValueError):
    """A parameter lies outside the domain of the law or operation."""


class ContractError(LabError):
    """A documented precondition of an operation does not hold."""


class GridError(LabError):
    """An evaluation grid cannot be used (e.g. CF too small to take logs)."""


class NumericError(LabError):
    """A numerical procedure did not reach its tolerance.

    ``achieved`` is the error estimate (or tolerance) actually reached and
    ``best`` the best value found, when one exists.
    """

    def __init__(self, message: str, achieved: float | None = None, best: float | None = None):
        super().__init__(message)
        self.achieved = achieved
        self.best = best


class BranchTrackingError(NumericError):
    """A characteristic function came too close to zero to track its logarithm."""


class ConfigError(LabError):
    """An experiment config is malformed; ``diagnostics`` lists every problem."""

    def __init__(self, message: str, diagnostics: list[str] | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or []


class UsageError(LabError):
    """The requested experiment does not apply to the given config."""
