"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class CatchernError(Exception):
    """Base class for all package errors."""


class InputValidationError(CatchernError, ValueError):
    """Malformed numerical input (wrong shape, NaN/Inf entries, ...)."""


class DomainError(CatchernError, ValueError):
    """An argument lies outside the domain of the operation (p < 1, odd degree, ...)."""


class CompositionError(CatchernError, ValueError):
    """Morphisms whose source/target or category context do not match."""


class StructuralError(CatchernError, ValueError):
    """Operators whose block structure does not conform to the graded space."""


class UnsupportedOperandError(CatchernError, TypeError):
    """A cochain lacks the data an operation needs (e.g. values on the adjoined unit)."""


class PreconditionError(CatchernError, ValueError):
    """A documented precondition failed; carries the offending residuals."""

    def __init__(self, message: str, residuals: dict | None = None):
        super().__init__(message)
        self.residuals = dict(residuals or {})


class SingularityError(CatchernError, ArithmeticError):
    """A matrix that must be invertible is numerically singular at path time ``t``."""

    def __init__(self, message: str, t: float | None = None):
        super().__init__(message)
        self.t = t
