from typing import Any, Optional


class BergkernError(Exception):
    """Base class for every error raised by bergkern."""


class ArgumentError(BergkernError, ValueError):
    pass


class DomainError(BergkernError, ValueError):
    """A point lies outside the domain, or a branch choice is ambiguous."""


class SingularityError(BergkernError):
    pass


class ConvergenceError(BergkernError):
    """Raised when an iterative scheme exhausts its budget.

    The partial estimate and its error are kept so callers can still report them.
    """

    def __init__(self, message: str, estimate: Any = None, error: Optional[float] = None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error
