"""Algebra of exponential sums and polynomial targets.

An ExpSum is a finite sum of Gaussians in x, sum of a_n * exp(-b_n x^2),
used to approximate the Q-function or a polynomial in Q.  This module
holds the two value types, the absolute/relative error functionals with
their first two x-derivatives, the large-x classification of the
relative error, and the product expansion that turns per-power
approximations into one for a product of powers.

All evaluation accepts scalars or arrays; term-by-point work is chunked
so very long sums (quadrature baselines reach thousands of terms) never
materialize oversized intermediates.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError, DomainError, ValidationError
from .qfunc import q, q_prime

__all__ = [
    "ErrorMeasure",
    "ExpSum",
    "TailClass",
    "TargetPoly",
    "combine_powers",
    "error",
    "error_prime",
    "error_second",
    "tail_class",
]

# cap on points*terms per evaluation block, ~32MB of float64
_BLOCK_BUDGET = 1 << 22


class ErrorMeasure(enum.Enum):
    """Which error functional a problem is stated in."""

    ABSOLUTE = "absolute"
    RELATIVE = "relative"


class TailClass(enum.Enum):
    """Limit behaviour of the error as x grows without bound."""

    DIVERGES = "diverges"
    CONVERGES_TO_MINUS_ONE = "converges_to_minus_one"
    CONVERGES_TO_ZERO_ABS = "converges_to_zero_abs"


@dataclass(frozen=True)
class ExpSum:
    """Weighted sum of exponentials sum of a_n * exp(-b_n * x^2).

    Terms are stored sorted by increasing rate b, which removes
    permutation ambiguity; weights and rates must be positive and
    rates distinct.
    """

    terms: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        cleaned = []
        for pair in self.terms:
            if len(pair) != 2:
                raise ValidationError(f"term {pair!r} is not an (a, b) pair")
            a, b = float(pair[0]), float(pair[1])
            if not (math.isfinite(a) and math.isfinite(b)):
                raise ValidationError(f"non-finite term ({a}, {b})")
            if a <= 0.0 or b <= 0.0:
                raise ValidationError(f"term ({a}, {b}) must have a > 0 and b > 0")
            cleaned.append((a, b))
        if not cleaned:
            raise ValidationError("an ExpSum needs at least one term")
        cleaned.sort(key=lambda ab: ab[1])
        for (_, b1), (_, b2) in zip(cleaned, cleaned[1:]):
            if b1 == b2:
                raise ValidationError(f"duplicate rate b = {b1}")
        object.__setattr__(self, "terms", tuple(cleaned))

    @property
    def n_terms(self) -> int:
        return len(self.terms)

    @property
    def a(self) -> np.ndarray:
        return np.array([t[0] for t in self.terms])

    @property
    def b(self) -> np.ndarray:
        return np.array([t[1] for t in self.terms])

    @property
    def min_b(self) -> float:
        return self.terms[0][1]

    def _blocks(self, x: np.ndarray) -> Iterable[tuple[slice, np.ndarray]]:
        flat = x.ravel()
        step = max(1, _BLOCK_BUDGET // self.n_terms)
        for start in range(0, flat.size, step):
            sl = slice(start, min(start + step, flat.size))
            yield sl, flat[sl]

    def _accumulate(self, x, weights: np.ndarray):
        arr = np.asarray(x, dtype=float)
        if not np.all(np.isfinite(arr)):
            raise DomainError("evaluation requires finite input")
        b = self.b
        out = np.empty(arr.size)
        with np.errstate(under="ignore"):
            for sl, chunk in self._blocks(arr):
                out[sl] = np.exp(-np.outer(chunk * chunk, b)) @ weights
        if arr.ndim == 0:
            return float(out[0])
        return out.reshape(arr.shape)

    def eval(self, x):
        """Value of the sum; sum of the weights at x = 0."""
        return self._accumulate(x, self.a)

    def eval_prime(self, x):
        """First derivative, -2x * sum of a_n b_n exp(-b_n x^2)."""
        arr = np.asarray(x, dtype=float)
        out = -2.0 * arr * self._accumulate(x, self.a * self.b)
        return float(out) if arr.ndim == 0 else out

    def eval_second(self, x):
        """Second derivative, sum of a_n (4 b_n^2 x^2 - 2 b_n) exp(-b_n x^2)."""
        arr = np.asarray(x, dtype=float)
        ab = self.a * self.b
        first = self._accumulate(x, ab)
        second = self._accumulate(x, ab * self.b)
        out = 4.0 * arr * arr * second - 2.0 * first
        return float(out) if arr.ndim == 0 else out


@dataclass(frozen=True)
class TargetPoly:
    """Polynomial in Q defining the approximation target, sum of c_p Q^p."""

    c: tuple[float, ...]

    def __post_init__(self) -> None:
        coeffs = tuple(float(v) for v in self.c)
        if len(coeffs) < 2:
            raise ValidationError("target degree must be at least 1")
        if not all(math.isfinite(v) for v in coeffs):
            raise ValidationError("non-finite polynomial coefficient")
        if coeffs[-1] == 0.0:
            raise ValidationError("leading coefficient must be nonzero")
        object.__setattr__(self, "c", coeffs)

    @classmethod
    def identity(cls) -> "TargetPoly":
        """The Q-function itself."""
        return cls((0.0, 1.0))

    @classmethod
    def power(cls, p: int) -> "TargetPoly":
        """The pure power Q^p."""
        if not isinstance(p, (int, np.integer)) or p < 1:
            raise ValidationError(f"power must be a positive integer, got {p!r}")
        return cls((0.0,) * int(p) + (1.0,))

    @property
    def degree(self) -> int:
        return len(self.c) - 1

    @property
    def tail_power(self) -> int:
        """Lowest power with a nonzero coefficient; dominates as Q -> 0."""
        for p, v in enumerate(self.c):
            if v != 0.0:
                return p
        raise ValidationError("all-zero polynomial")  # unreachable after init

    def omega(self, qv):
        """The polynomial evaluated at a Q-value."""
        return np.polynomial.polynomial.polyval(qv, self.c)

    def omega_prime(self, qv):
        der = np.polynomial.polynomial.polyder(self.c)
        return np.polynomial.polynomial.polyval(qv, der)

    def omega_second(self, qv):
        der2 = np.polynomial.polynomial.polyder(self.c, 2)
        return np.polynomial.polynomial.polyval(qv, der2)

    def eval(self, x):
        """Target value Omega(Q(x))."""
        return self.omega(q(x))

    def eval_prime(self, x):
        """x-derivative via the chain rule, Omega'(Q(x)) * Q'(x)."""
        return self.omega_prime(q(x)) * q_prime(x)

    def eval_second(self, x):
        """Second x-derivative; uses Q''(x) = -x Q'(x)."""
        qv = q(x)
        qp = q_prime(x)
        arr = np.asarray(x, dtype=float)
        out = self.omega_second(qv) * qp * qp - arr * self.omega_prime(qv) * qp
        return float(out) if arr.ndim == 0 else out


def _relative_denominator(t: TargetPoly, x):
    denom = t.eval(x)
    if np.any(np.asarray(denom) <= 0.0):
        raise DomainError(
            "relative error needs a strictly positive target value; "
            "the target vanished or went negative on the given points"
        )
    return denom


def error(s: ExpSum, t: TargetPoly, measure: ErrorMeasure, x):
    """Signed approximation error, absolute (d) or relative (r)."""
    diff = s.eval(x) - t.eval(x)
    if measure is ErrorMeasure.ABSOLUTE:
        return diff
    return diff / _relative_denominator(t, x)


def error_prime(s: ExpSum, t: TargetPoly, measure: ErrorMeasure, x):
    """Analytic x-derivative of `error`.

    The relative branch divides by the target once per differentiation
    order (never by its square), so it stays finite wherever the target
    itself is representable — T**2 would underflow long before T does.
    """
    dprime = s.eval_prime(x) - t.eval_prime(x)
    if measure is ErrorMeasure.ABSOLUTE:
        return dprime
    denom = _relative_denominator(t, x)
    r = (s.eval(x) - t.eval(x)) / denom
    return (dprime - r * t.eval_prime(x)) / denom


def error_second(s: ExpSum, t: TargetPoly, measure: ErrorMeasure, x):
    """Analytic second x-derivative of `error` (solver Jacobian rows)."""
    d2 = s.eval_second(x) - t.eval_second(x)
    if measure is ErrorMeasure.ABSOLUTE:
        return d2
    denom = _relative_denominator(t, x)
    tp = t.eval_prime(x)
    r = (s.eval(x) - t.eval(x)) / denom
    rp = (s.eval_prime(x) - tp - r * tp) / denom
    return (d2 - 2.0 * rp * tp - r * t.eval_second(x)) / denom


def tail_class(
    s: ExpSum, t: TargetPoly, measure: ErrorMeasure = ErrorMeasure.RELATIVE
) -> TailClass:
    """Classify the error limit as x -> infinity.

    The absolute error always decays to zero.  The relative error
    compares the slowest exponential rate min(b) against the target's
    tail, whose dominant piece is the lowest nonzero power p of Q and
    decays like x^-p exp(-p x^2 / 2).  At min(b) = p/2 the algebraic
    x^p factor still drives the ratio to infinity.
    """
    if measure is ErrorMeasure.ABSOLUTE:
        return TailClass.CONVERGES_TO_ZERO_ABS
    p = t.tail_power
    if p == 0:
        return TailClass.CONVERGES_TO_MINUS_ONE
    if s.min_b <= 0.5 * p:
        return TailClass.DIVERGES
    return TailClass.CONVERGES_TO_MINUS_ONE


def combine_powers(factors: Sequence[tuple[ExpSum, int]]) -> ExpSum:
    """Multiply per-power approximations into one ExpSum.

    Each (s, k) contributes k copies of s to the product; weights
    multiply and rates add.  Rates that collide within 1e-12 relative
    merge into a single term, so the result can have fewer terms than
    the raw product.
    """
    if not factors:
        raise ValidationError("need at least one factor")
    expanded: list[ExpSum] = []
    count = 1
    for item in factors:
        if len(item) != 2:
            raise ValidationError(f"factor {item!r} is not an (ExpSum, power) pair")
        s, k = item
        if not isinstance(s, ExpSum):
            raise ValidationError("first element of each factor must be an ExpSum")
        if not isinstance(k, (int, np.integer)) or k < 1:
            raise ValidationError(f"power must be a positive integer, got {k!r}")
        for _ in range(int(k)):
            count *= s.n_terms
            expanded.append(s)
    if count > 10_000:
        raise CapacityError(f"product would have {count} terms (limit 10000)")

    a_acc = np.array([1.0])
    b_acc = np.array([0.0])
    for s in expanded:
        a_acc = np.outer(a_acc, s.a).ravel()
        b_acc = (b_acc[:, None] + s.b[None, :]).ravel()

    order = np.argsort(b_acc)
    a_acc, b_acc = a_acc[order], b_acc[order]
    merged: list[tuple[float, float]] = []
    for a, b in zip(a_acc, b_acc):
        if merged and abs(b - merged[-1][1]) <= 1e-12 * merged[-1][1]:
            prev_a, prev_b = merged[-1]
            merged[-1] = (prev_a + a, prev_b)
        else:
            merged.append((float(a), float(b)))
    return ExpSum(tuple(merged))
