"""Exception types raised across the package."""


class ClosenessError(Exception):
    """Base class for all package errors."""


class DimensionError(ClosenessError, ValueError):
    """Inputs disagree on domain size or batch length."""


class DomainError(ClosenessError, ValueError):
    """A parameter lies outside the range where an operation is defined."""


class SymbolRangeError(ClosenessError, IndexError):
    """A symbol or index falls outside ``1..k``."""


class DegenerateInputError(ClosenessError, ValueError):
    """Input is well-formed but carries no information (e.g. zero samples)."""


class QuadratureError(ClosenessError, ArithmeticError):
    """Numerical integration did not reach the requested tolerance."""

    def __init__(self, message, *, estimate=None, error=None, intervals=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error
        self.intervals = intervals
