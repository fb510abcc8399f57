from __future__ import annotations

from typing import TYPE_CHECKING, Optional

if TYPE_CHECKING:
    from sharpbounds.api.core import FeasibleRegion


class SharpBoundsError(Exception):
    """
    Generic sharpbounds exception.
    """


class ProbabilityError(SharpBoundsError, ValueError):
    """
    Raised when a value that must be a probability lies outside [0, 1].
    """


class MarginsError(SharpBoundsError, ValueError):
    """
    Raised when observed margins leave an exposure arm unobserved.
    """


class DomainError(SharpBoundsError):
    """
    Base for inputs that parse correctly but are infeasible for the model.
    """


class InfeasibleParamsError(DomainError, ValueError):
    """
    Raised when sensitivity parameters lie outside the feasible region implied
    by the observed margins.
    """

    def __init__(self, message: str, boundary: float, region: Optional["FeasibleRegion"] = None):
        super().__init__(message)
        self.boundary = boundary
        self.region = region


class InfeasibleMError(InfeasibleParamsError):
    """
    Raised when M < M* or M > 1.
    """


class InfeasibleSmallMError(InfeasibleParamsError):
    """
    Raised when m < 0 or m > m*.
    """


class InvertedParamsError(InfeasibleParamsError):
    """
    Raised when m > M.
    """


class EpsilonOutOfRangeError(DomainError, ValueError):
    """
    Raised when a witness epsilon is not strictly between 0 and 1.
    """


class DegenerateSupportError(DomainError, ValueError):
    """
    Raised when a sampling distribution is asked to draw from an interval of
    zero length.
    """


class IndeterminateError(DomainError, ArithmeticError):
    """
    Raised when a contrast evaluates to an indeterminate form (0/0, inf/inf,
    inf - inf).
    """


class ContrastError(SharpBoundsError, ValueError):
    """
    Raised for unknown contrast names or custom contrasts that are not monotone
    in the required directions.
    """


class DistributionError(SharpBoundsError, ValueError):
    """
    Raised when a sensitivity parameter distribution is malformed.
    """


class IngestError(SharpBoundsError):
    """
    Exception raised for data ingestion errors.
    """


class EmptyArmError(IngestError, ValueError):
    """
    Raised when one exposure arm has no observations.
    """


class MalformedRowError(IngestError, ValueError):
    """
    Raised when a record row does not hold binary exposure/outcome values.
    """

    def __init__(self, message: str, row_number: int):
        super().__init__(message)
        self.row_number = row_number


class ConfigError(SharpBoundsError, ValueError):
    """
    Raised when configuration values are invalid.
    """
