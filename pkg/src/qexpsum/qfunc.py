"""Gaussian Q-function: high-accuracy evaluation, derivative, and a
Craig-formula quadrature oracle.

The tail probability is computed through the complementary error function,
q(x) = erfc(x / sqrt(2)) / 2.  A plain call to erfc loses accuracy for
large arguments because rounding x / sqrt(2) once costs a relative error
that erfc amplifies by roughly x^2 * eps (about 1.5e-13 at x = 37).  The
argument is therefore carried as a double-double (head + tail) and the
tail is folded back in through the first derivative of erfc.  Against a
50-digit oracle this keeps the relative error below 4e-16 over the whole
normal range; values underflow gracefully to zero past x ~ 38.5.

The Craig-form oracle integrates exp(-x^2 / (2 sin^2 theta)) / pi over
theta in [0, pi/2] with a Gauss-Legendre rule and exists purely to
cross-check q from an independent direction.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError, ValidationError
from .quadrature import gauss_legendre

__all__ = ["q", "q_prime", "q_craig_oracle", "REFERENCE_Q_TABLE"]

_INV_SQRT2 = 0.7071067811865476
# 1/sqrt(2) minus the double above, to 53 further bits
_INV_SQRT2_TAIL = -4.833646656726457e-17
_TWO_OVER_SQRT_PI = 1.1283791670955126
_INV_SQRT_2PI = 0.3989422804014327
_SPLITTER = 134217729.0  # 2**27 + 1


def _veltkamp(a: float) -> tuple[float, float]:
    t = _SPLITTER * a
    hi = t - (t - a)
    return hi, a - hi


_C_HI, _C_LO = _veltkamp(_INV_SQRT2)

# Reference tail probabilities computed offline with a 50-digit
# arbitrary-precision oracle; frozen here so accuracy is asserted against
# values this package cannot produce for itself.
REFERENCE_Q_TABLE: tuple[tuple[float, float], ...] = (
    (0.01, 0.4960106436853684),
    (0.1, 0.460172162722971),
    (0.25, 0.4012936743170763),
    (0.5, 0.3085375387259869),
    (0.75, 0.2266273523768682),
    (1.0, 0.15865525393145705),
    (1.5, 0.06680720126885807),
    (2.0, 0.02275013194817921),
    (3.0, 0.0013498980316300946),
    (4.0, 3.1671241833119924e-05),
    (5.0, 2.866515718791939e-07),
    (6.0, 9.86587645037698e-10),
    (8.0, 6.220960574271784e-16),
    (10.0, 7.619853024160525e-24),
    (13.0, 6.11716439954988e-39),
    (17.0, 4.1059962020989065e-65),
    (22.0, 1.439892435145079e-107),
    (28.0, 8.123869469659427e-173),
    (33.0, 4.061185620915855e-239),
    (37.0, 5.725571222524577e-300),
)


def _q_scalar(x: float) -> float:
    # y = x / sqrt(2) as head + tail; the tail enters via erfc'(y).
    prod = x * _INV_SQRT2
    xh, xl = _veltkamp(x)
    prod_err = ((xh * _C_HI - prod) + xh * _C_LO + xl * _C_HI) + xl * _C_LO
    tail = prod_err + x * _INV_SQRT2_TAIL
    correction = tail * _TWO_OVER_SQRT_PI * math.exp(-prod * prod)
    return 0.5 * (math.erfc(prod) - correction)


_erfc_ufunc = np.frompyfunc(math.erfc, 1, 1)


def _q_array(arr: np.ndarray) -> np.ndarray:
    prod = arr * _INV_SQRT2
    t = _SPLITTER * arr
    xh = t - (t - arr)
    xl = arr - xh
    prod_err = ((xh * _C_HI - prod) + xh * _C_LO + xl * _C_HI) + xl * _C_LO
    tail = prod_err + arr * _INV_SQRT2_TAIL
    base = _erfc_ufunc(prod).astype(float)
    with np.errstate(under="ignore"):
        correction = tail * _TWO_OVER_SQRT_PI * np.exp(-prod * prod)
    return 0.5 * (base - correction)


def q(x):
    """Tail probability Q(x) of the standard normal distribution.

    Parameters
    ----------
    x : float or ndarray
        Argument, finite and nonnegative.

    Returns
    -------
    float or ndarray
        Q(x) in [0, 1/2], with relative error below 1e-14 wherever the
        result is representable in 64-bit floating point.
    """
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("q requires finite input")
    if np.any(arr < 0.0):
        raise DomainError("q accepts x >= 0 only; use Q(x) = 1 - Q(-x)")
    if arr.ndim == 0:
        return _q_scalar(float(arr))
    return _q_array(arr)


def q_prime(x):
    """Derivative of Q: minus the standard normal density at x."""
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("q_prime requires finite input")
    with np.errstate(under="ignore"):
        out = -_INV_SQRT_2PI * np.exp(-0.5 * arr * arr)
    return float(out) if arr.ndim == 0 else out


def _craig_panels(x: float) -> list[tuple[float, float]]:
    """Integration panels for the Craig integrand at a given x.

    The integrand exp(-x^2 / (2 sin^2 theta)) is flat near zero, rises
    through a layer centred around theta ~ x, and flattens again toward
    pi/2.  A single Gauss-Legendre rule across [0, pi/2] cannot resolve
    the layer once x is small, so the interval is split: the stretch
    below theta_0 = x / sqrt(x^2 + 80) contributes less than 1e-14 of
    the total (integrand under exp(-40) there, at every x) and is
    dropped outright; panels then follow the layer at multiples of x
    and continue geometrically up to pi/2.
    """
    half_pi = 0.5 * math.pi
    theta0 = x / math.sqrt(x * x + 80.0)
    if x >= 0.4:
        return [(theta0, half_pi)]
    cuts = [theta0]
    for c in (0.5, 2.0, 8.0):
        t = c * x
        if t < 0.75 * half_pi:
            cuts.append(t)
    t = cuts[-1] * 6.0
    while t < 0.75 * half_pi:
        cuts.append(t)
        t *= 6.0
    cuts.append(half_pi)
    return list(zip(cuts[:-1], cuts[1:]))


def q_craig_oracle(x: float, nodes: int = 64) -> float:
    """Q(x) by composite Gauss-Legendre integration of the Craig form.

    An independent route to the same number as ``q``: the integrand
    exp(-x^2 / (2 sin^2 theta)) is averaged over theta in [0, pi/2],
    with ``nodes`` Gauss-Legendre nodes on each panel of an x-adaptive
    panelization.  With 64 or more nodes this agrees with ``q`` to
    1e-12 relative for x in [0, 8].
    """
    if not isinstance(nodes, (int, np.integer)) or nodes < 4:
        raise ValidationError(f"need at least 4 nodes, got {nodes!r}")
    xf = float(x)
    if not math.isfinite(xf):
        raise DomainError("q_craig_oracle requires finite input")
    if xf < 0.0:
        raise DomainError("q_craig_oracle accepts x >= 0 only")
    if xf == 0.0:
        return 0.5
    t, w = gauss_legendre(int(nodes))
    total = 0.0
    for a, b in _craig_panels(xf):
        theta = 0.5 * (a + b) + 0.5 * (b - a) * t
        s = np.sin(theta)
        with np.errstate(under="ignore"):
            total += 0.5 * (b - a) * float(w @ np.exp(-(xf * xf) / (2.0 * s * s)))
    return total / math.pi
