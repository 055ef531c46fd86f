"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class TfbmError(Exception):
    """Base class for all package errors."""


class DomainError(TfbmError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class UnsupportedParameterError(TfbmError, ValueError):
    """The requested representation is undefined for these parameters."""


class DegenerateCaseError(TfbmError, ValueError):
    """The operation has no meaningful value at a degenerate parameter point."""


class QuadratureError(TfbmError, ArithmeticError):
    """A numerical integral failed to reach its requested tolerance."""

    def __init__(self, message: str, *, tau: float | None = None, estimate: float | None = None,
                 abs_err: float | None = None):
        super().__init__(message)
        self.tau = tau
        self.estimate = estimate
        self.abs_err = abs_err


class NotPSDError(TfbmError, ArithmeticError):
    """A covariance matrix could not be factored even after maximal jitter."""


class KernelEvaluationError(TfbmError, RuntimeError):
    """A kernel evaluation failed while filling a covariance matrix."""

    def __init__(self, message: str, *, index: tuple[int, int] | None = None):
        super().__init__(message)
        self.index = index


class RegimeWarning(UserWarning):
    """A check was run outside the regime where its asymptotic law applies."""


class SeriesDivergenceWarning(UserWarning):
    """An asymptotic series started growing before the requested number of terms."""
