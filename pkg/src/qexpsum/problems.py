"""Minimax problem descriptions and solved-problem containers.

A SolveSpec pins down one equalized-extrema problem: what is being
approximated, in which error measure, whether the result must stay
one-sided (bounds) or may oscillate (approximations), how the error
starts at the origin, and how the extrema are weighted.  The number of
interior extrema K and the signed level each extremum must reach follow
from (measure, variant) bookkeeping and are derived here so the solver
and the certification code agree on a single source.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ValidationError
from .expsum import ErrorMeasure, ExpSum, TargetPoly

__all__ = [
    "Kind",
    "MinimaxSolution",
    "Origin",
    "SolveSpec",
    "VariantKind",
]


class Kind(enum.Enum):
    APPROXIMATION = "approximation"
    LOWER_BOUND = "lower_bound"
    UPPER_BOUND = "upper_bound"


class Origin(enum.Enum):
    """How the error starts at x = 0."""

    ZERO_AT_ORIGIN = "zero_at_origin"
    WEIGHTED_AT_ORIGIN = "weighted_at_origin"


@dataclass(frozen=True)
class VariantKind:
    """A (kind, origin) combination; only approximations get a choice.

    Lower bounds must start weighted (the error is never positive, so a
    zero start would pin an extra tangency at the origin); upper bounds
    start at zero for the mirrored reason.
    """

    kind: Kind
    origin: Origin

    def __post_init__(self) -> None:
        if self.kind is Kind.LOWER_BOUND and self.origin is not Origin.WEIGHTED_AT_ORIGIN:
            raise ValidationError("lower bounds start at -w0*e_max; use weighted_at_origin")
        if self.kind is Kind.UPPER_BOUND and self.origin is not Origin.ZERO_AT_ORIGIN:
            raise ValidationError("upper bounds start at zero; use zero_at_origin")

    @classmethod
    def approximation(cls, origin: Origin = Origin.WEIGHTED_AT_ORIGIN) -> "VariantKind":
        return cls(Kind.APPROXIMATION, origin)

    @classmethod
    def lower_bound(cls) -> "VariantKind":
        return cls(Kind.LOWER_BOUND, Origin.WEIGHTED_AT_ORIGIN)

    @classmethod
    def upper_bound(cls) -> "VariantKind":
        return cls(Kind.UPPER_BOUND, Origin.ZERO_AT_ORIGIN)


def _extrema_count(measure: ErrorMeasure, kind: Kind, n: int) -> int:
    if measure is ErrorMeasure.ABSOLUTE:
        return 2 * n - 1 if kind is Kind.UPPER_BOUND else 2 * n
    return 2 * n - 2 if kind is Kind.UPPER_BOUND else 2 * n - 1


@dataclass(frozen=True)
class SolveSpec:
    """Complete description of one minimax problem."""

    target: TargetPoly
    measure: ErrorMeasure
    variant: VariantKind
    n: int
    weights: Optional[tuple[float, ...]] = None
    x_end: Optional[float] = None
    fixed_min_b: Optional[float] = None

    def __post_init__(self) -> None:
        if not isinstance(self.n, (int, np.integer)) or not 1 <= self.n <= 25:
            raise ValidationError(f"N must be an integer in [1, 25], got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))

        if self.measure is ErrorMeasure.RELATIVE:
            if self.x_end is None:
                raise ValidationError("relative measure needs x_end")
            xe = float(self.x_end)
            if not (0.5 <= xe <= 20.0):
                raise ValidationError(f"x_end must lie in [0.5, 20], got {xe}")
            object.__setattr__(self, "x_end", xe)
            self._check_positive_denominator()
        elif self.x_end is not None:
            raise ValidationError("x_end only applies to the relative measure")

        if self.variant.kind is Kind.UPPER_BOUND:
            forced = 0.5 * self.target.tail_power
            if forced <= 0.0:
                raise ValidationError(
                    "upper bounds need a target with a vanishing tail"
                )
            if self.fixed_min_b is None:
                object.__setattr__(self, "fixed_min_b", forced)
            elif not math.isclose(float(self.fixed_min_b), forced, rel_tol=1e-12):
                raise ValidationError(
                    f"upper bounds force min b = {forced}, got {self.fixed_min_b}"
                )
            else:
                object.__setattr__(self, "fixed_min_b", forced)
        elif self.fixed_min_b is not None:
            raise ValidationError(
                "fixing min b adds a constraint only upper bounds can absorb"
            )

        expected = self.weight_count
        if self.weights is None:
            object.__setattr__(self, "weights", (1.0,) * expected)
        else:
            w = tuple(float(v) for v in self.weights)
            if len(w) != expected:
                raise ValidationError(
                    f"need {expected} weights (w0..w{expected - 1}), got {len(w)}"
                )
            if not all(0.0 < v <= 1.0 for v in w):
                raise ValidationError("weights must lie in (0, 1]")
            if max(w) != 1.0:
                raise ValidationError("at least one weight must equal 1")
            object.__setattr__(self, "weights", w)

    def _check_positive_denominator(self) -> None:
        qs = np.linspace(1e-6, 0.5, 2001)
        if np.any(self.target.omega(qs) <= 0.0):
            raise ValidationError(
                "relative measure needs a target polynomial positive on (0, 1/2]"
            )

    # --- derived bookkeeping -------------------------------------------------

    @property
    def extrema_count(self) -> int:
        """K, the number of interior extrema (Table I of the construction)."""
        return _extrema_count(self.measure, self.variant.kind, self.n)

    @property
    def weight_count(self) -> int:
        # w0 (origin) .. wK, plus the endpoint weight for relative measure
        return self.extrema_count + (2 if self.measure is ErrorMeasure.RELATIVE else 1)

    @property
    def system_size(self) -> int:
        """Equation count as conventionally stated, min-b constraint included."""
        if self.measure is ErrorMeasure.ABSOLUTE:
            return 4 * self.n if self.variant.kind is Kind.UPPER_BOUND else 4 * self.n + 1
        return 4 * self.n - 1 if self.variant.kind is Kind.UPPER_BOUND else 4 * self.n

    @property
    def internal_size(self) -> int:
        """Unknowns the solver actually carries (fixed min-b substituted out)."""
        free_b = self.n - (1 if self.fixed_min_b is not None else 0)
        return self.n + free_b + self.extrema_count + 1

    def value_levels(self) -> np.ndarray:
        """Signed per-extremum multipliers: e(x_k) = level_k * e_max."""
        k = np.arange(1, self.extrema_count + 1)
        w = np.asarray(self.weights[1 : self.extrema_count + 1])
        kind = self.variant.kind
        if kind is Kind.APPROXIMATION:
            return np.where(k % 2 == 1, w, -w)
        if kind is Kind.LOWER_BOUND:
            return np.where(k % 2 == 1, 0.0, -w)
        return np.where(k % 2 == 1, w, 0.0)

    @property
    def origin_level(self) -> float:
        """Multiplier in e(0) = level * e_max."""
        if self.variant.origin is Origin.ZERO_AT_ORIGIN:
            return 0.0
        return -self.weights[0]

    @property
    def endpoint_level(self) -> Optional[float]:
        """Multiplier in e(x_end) = level * e_max (relative measure only)."""
        if self.measure is ErrorMeasure.ABSOLUTE:
            return None
        w = self.weights[-1]
        return w if self.variant.kind is Kind.UPPER_BOUND else -w


@dataclass(frozen=True)
class MinimaxSolution:
    """A converged equalized-extrema solution with solver diagnostics."""

    expsum: ExpSum
    e_max: float
    extrema: tuple[float, ...]
    spec: SolveSpec
    iterations: int
    residual_norm: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.e_max) and self.e_max > 0.0):
            raise ValidationError(f"e_max must be positive, got {self.e_max!r}")
        xs = tuple(float(v) for v in self.extrema)
        if len(xs) != self.spec.extrema_count:
            raise ValidationError(
                f"expected {self.spec.extrema_count} extrema, got {len(xs)}"
            )
        if any(v <= 0.0 for v in xs) or any(p >= q for p, q in zip(xs, xs[1:])):
            raise ValidationError("extrema must be positive and strictly increasing")
        if self.spec.x_end is not None and xs and xs[-1] >= self.spec.x_end:
            raise ValidationError("extrema must stay below x_end")
        if not self.residual_norm <= 1e-12:
            raise ValidationError(
                f"residual norm {self.residual_norm!r} exceeds the 1e-12 contract"
            )
        object.__setattr__(self, "extrema", xs)
        object.__setattr__(self, "e_max", float(self.e_max))
        object.__setattr__(self, "residual_norm", float(self.residual_norm))
        object.__setattr__(self, "iterations", int(self.iterations))
