"""Minimax exponential-sum approximations of the Gaussian Q-function."""

from __future__ import annotations

from .erranalysis import (
    CertReport,
    CheckResult,
    ErrorProfile,
    certify,
    certify_set,
    find_extrema,
    max_error,
    profile,
)
from .errors import (
    CapacityError,
    CoefficientFileError,
    ContractViolation,
    DomainError,
    NumericError,
    QExpSumError,
    SolverFailure,
    ValidationError,
)
from .expsum import (
    ErrorMeasure,
    ExpSum,
    TailClass,
    TargetPoly,
    combine_powers,
    error,
    error_prime,
    error_second,
    tail_class,
)
from .minimax import (
    SweepOutcome,
    initial_guess,
    jacobian,
    pack,
    residuals,
    solve,
    sweep,
    unpack,
)
from .problems import Kind, MinimaxSolution, Origin, SolveSpec, VariantKind
from .qfunc import q, q_craig_oracle, q_prime

__all__ = [
    "CapacityError",
    "CertReport",
    "CheckResult",
    "CoefficientFileError",
    "ContractViolation",
    "DomainError",
    "ErrorMeasure",
    "ErrorProfile",
    "ExpSum",
    "Kind",
    "MinimaxSolution",
    "NumericError",
    "Origin",
    "QExpSumError",
    "SolveSpec",
    "SolverFailure",
    "SweepOutcome",
    "TailClass",
    "TargetPoly",
    "ValidationError",
    "VariantKind",
    "certify",
    "certify_set",
    "combine_powers",
    "error",
    "error_prime",
    "error_second",
    "find_extrema",
    "initial_guess",
    "jacobian",
    "max_error",
    "pack",
    "profile",
    "q",
    "q_craig_oracle",
    "q_prime",
    "residuals",
    "solve",
    "sweep",
    "tail_class",
    "unpack",
]

__version__ = "0.1.0"
