"""Exception hierarchy shared by all qexpsum modules."""

from __future__ import annotations


class QExpSumError(Exception):
    """Base class for every error raised by this package."""


class DomainError(QExpSumError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class ValidationError(QExpSumError, ValueError):
    """A value object violates one of its structural invariants."""


class ContractViolation(QExpSumError, ValueError):
    """Caller broke an interface contract (dimension or kind mismatch)."""


class CapacityError(QExpSumError, ValueError):
    """A requested expansion exceeds the supported term budget."""


class SolverFailure(QExpSumError, RuntimeError):
    """Newton iteration did not reach the residual threshold.

    Carries the best residual norm seen across all restart attempts so
    callers can report how close the solve came.
    """

    def __init__(self, message: str, best_residual: float = float("nan")):
        super().__init__(message)
        self.best_residual = best_residual


class NumericError(QExpSumError, RuntimeError):
    """A numerical routine (integration, refinement) failed to converge."""


class CoefficientFileError(QExpSumError, ValueError):
    """A coefficient file could not be parsed; message includes position."""
