"""Equalized-extrema solver for minimax exponential-sum problems.

The unknowns of a problem are the amplitudes a_n, the rates b_n, the
interior extremum positions x_k of the error function, and the level
e_max it equalizes to.  They are carried in a transformed vector u:

    a_n   = exp(alpha_n)
    b_1   = exp(beta_1)            (or pinned by the spec for upper bounds)
    b_n   = b_{n-1} * (1 + exp(beta_n))
    x_1   = exp(xi_1)
    x_k   = x_{k-1} + exp(xi_k)
    e_max = exp(epsilon)

which bakes positivity and strict ordering into the coordinates and
removes the permutation and sign degeneracies of the raw system.  The
residuals stack, in order: e'(x_k) = 0 for each extremum, the value
conditions e(x_k) = level_k * e_max, the origin condition, and (for the
relative measure) the endpoint condition at x_end.  Value-type rows are
oriented as level * e_max - e(x) so the origin row reads as the classic
sum rule: target(0) + level * e_max - sum(a).

A damped Newton iteration with the analytic Jacobian drives the
infinity norm of the residual below 1e-12; a deterministic schedule of
perturbed restarts handles fragile starts, and each converged candidate
is accepted only after an independent scan of its error function
confirms the extremum census and the attained maximum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .erranalysis import find_extrema, max_error
from .errors import (
    ContractViolation,
    DomainError,
    SolverFailure,
    ValidationError,
)
from .expsum import ErrorMeasure, ExpSum, error, error_second
from .problems import Kind, MinimaxSolution, Origin, SolveSpec, VariantKind

__all__ = [
    "SweepOutcome",
    "initial_guess",
    "jacobian",
    "pack",
    "residuals",
    "solve",
    "sweep",
    "unpack",
]

_RESIDUAL_TOL = 1e-12
_MAX_ITER = 200
_RESTARTS = 5
_MIN_STEP = 2.0**-30
_STEP_CAP = 2.0  # per-iteration bound on the log-coordinate update
_XE_ANCHOR = 6.0  # widest interval where rate-scale seeding is reliable


# --------------------------------------------------------------------------
# coordinate transform


@dataclass(frozen=True)
class _State:
    a: np.ndarray
    b: np.ndarray
    x: np.ndarray
    e_max: float


def _sizes(spec: SolveSpec, with_level: bool) -> int:
    free_b = spec.n - (1 if spec.fixed_min_b is not None else 0)
    return spec.n + free_b + spec.extrema_count + (1 if with_level else 0)


def _unpack(spec: SolveSpec, u: np.ndarray, with_level: bool) -> _State:
    u = np.asarray(u, dtype=float)
    if u.shape != (_sizes(spec, with_level),):
        raise ContractViolation(
            f"unknown vector has length {u.shape}, expected ({_sizes(spec, with_level)},)"
        )
    n, k = spec.n, spec.extrema_count
    with np.errstate(over="ignore"):
        a = np.exp(u[:n])
        pos = n
        if spec.fixed_min_b is not None:
            ratios = 1.0 + np.exp(u[pos : pos + n - 1])
            b = spec.fixed_min_b * np.concatenate([[1.0], np.cumprod(ratios)])
            pos += n - 1
        else:
            ratios = 1.0 + np.exp(u[pos + 1 : pos + n])
            b = np.exp(u[pos]) * np.concatenate([[1.0], np.cumprod(ratios)])
            pos += n
        x = np.cumsum(np.exp(u[pos : pos + k]))
        pos += k
        e_max = float(np.exp(u[pos])) if with_level else math.nan
    return _State(a, b, x, e_max)


def _pack(
    spec: SolveSpec,
    a: Sequence[float],
    b: Sequence[float],
    x: Sequence[float],
    e_max: float,
    with_level: bool,
) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    x = np.asarray(x, dtype=float)
    if a.shape != (spec.n,) or b.shape != (spec.n,):
        raise ContractViolation("need one (a, b) pair per term")
    if x.shape != (spec.extrema_count,):
        raise ContractViolation(
            f"need {spec.extrema_count} extremum positions, got {x.shape}"
        )
    if np.any(a <= 0.0) or np.any(b <= 0.0) or np.any(np.diff(b) <= 0.0):
        raise ContractViolation("amplitudes/rates must be positive with increasing b")
    if np.any(x <= 0.0) or np.any(np.diff(x) <= 0.0):
        raise ContractViolation("extrema must be positive and strictly increasing")
    parts = [np.log(a)]
    if spec.fixed_min_b is not None:
        if not math.isclose(b[0], spec.fixed_min_b, rel_tol=1e-9):
            raise ContractViolation(
                f"spec pins min b = {spec.fixed_min_b}, got {b[0]}"
            )
        parts.append(np.log(b[1:] / b[:-1] - 1.0))
    else:
        parts.append(np.concatenate([[math.log(b[0])], np.log(b[1:] / b[:-1] - 1.0)]))
    parts.append(np.log(np.diff(x, prepend=0.0)))
    if with_level:
        if not e_max > 0.0:
            raise ContractViolation("e_max must be positive")
        parts.append([math.log(e_max)])
    return np.concatenate(parts)


def pack(
    spec: SolveSpec,
    a: Sequence[float],
    b: Sequence[float],
    x: Sequence[float],
    e_max: float,
) -> np.ndarray:
    """Transform explicit (a, b, x, e_max) values into an unknown vector."""
    return _pack(spec, a, b, x, e_max, with_level=True)


def unpack(spec: SolveSpec, u: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, float]:
    """Inverse of `pack`; returns (a, b, x, e_max)."""
    st = _unpack(spec, u, with_level=True)
    return st.a, st.b, st.x, st.e_max


# --------------------------------------------------------------------------
# residual system and Jacobian


@dataclass(frozen=True)
class _Rows:
    """Error values and their parameter partials at the condition points.

    Points are ordered [0, x_1, ..., x_K, (x_end)].  All arrays are in
    original (untransformed) parameter coordinates.
    """

    points: np.ndarray
    e: np.ndarray  # e at each point
    ep: np.ndarray  # e' at each point
    de_da: np.ndarray  # (M, N)
    de_db: np.ndarray
    dep_da: np.ndarray
    dep_db: np.ndarray
    epp_x: np.ndarray  # e'' at the extremum points only (K,)


def _evaluate(spec: SolveSpec, st: _State) -> _Rows:
    t = spec.target
    pts = [0.0, *st.x]
    if spec.measure is ErrorMeasure.RELATIVE:
        pts.append(float(spec.x_end))
    p = np.asarray(pts)
    p2 = p * p

    with np.errstate(under="ignore"):
        ex = np.exp(-np.outer(p2, st.b))  # (M, N)
    sv = ex @ st.a
    spv = -2.0 * p * (ex @ (st.a * st.b))
    tv = np.asarray(t.eval(p), dtype=float)
    tp = np.asarray(t.eval_prime(p), dtype=float)

    e = sv - tv
    ep = spv - tp
    de_da = ex
    de_db = -(ex * st.a) * p2[:, None]
    dep_da = -2.0 * p[:, None] * (ex * st.b)
    dep_db = -2.0 * p[:, None] * (ex * st.a) * (1.0 - p2[:, None] * st.b)

    if spec.measure is ErrorMeasure.RELATIVE:
        if np.any(tv < 1e-300):
            raise DomainError("target vanished at a condition point")
        ti = 1.0 / tv
        ratio = (tp * ti)[:, None]
        e = e * ti
        ep = (ep - e * tp) * ti
        drp_da = (dep_da - de_da * ratio) * ti[:, None]
        drp_db = (dep_db - de_db * ratio) * ti[:, None]
        de_da = de_da * ti[:, None]
        de_db = de_db * ti[:, None]
        dep_da, dep_db = drp_da, drp_db

    s = ExpSum(tuple(zip(st.a.tolist(), st.b.tolist())))
    epp_x = np.asarray(error_second(s, t, spec.measure, st.x))
    return _Rows(p, e, ep, de_da, de_db, dep_da, dep_db, np.atleast_1d(epp_x))


def _condition_levels(spec: SolveSpec) -> np.ndarray:
    """Levels for the condition points in [0, x_1..x_K, (x_end)] order."""
    parts = [np.array([spec.origin_level]), spec.value_levels()]
    if spec.measure is ErrorMeasure.RELATIVE:
        parts.append(np.array([spec.endpoint_level]))
    return np.concatenate(parts)


def _residual_vector(spec: SolveSpec, rows: _Rows, st: _State, with_level: bool) -> np.ndarray:
    k = spec.extrema_count
    lv = _condition_levels(spec)
    deriv = rows.ep[1 : k + 1]
    if with_level:
        # value rows for the extrema, then origin, then endpoint
        vals = lv * st.e_max - rows.e
        return np.concatenate([deriv, vals[1 : k + 1], vals[:1], vals[k + 1 :]])
    zero_rows = -rows.e[lv == 0.0]
    mag = np.flatnonzero(lv != 0.0)
    chain = rows.e[mag[:-1]] * lv[mag[1:]] - rows.e[mag[1:]] * lv[mag[:-1]]
    return np.concatenate([deriv, zero_rows, chain])


def _jacobian_matrix(spec: SolveSpec, rows: _Rows, st: _State, with_level: bool) -> np.ndarray:
    n, k = spec.n, spec.extrema_count
    lv = _condition_levels(spec)
    m = rows.points.size

    # parameter partials of each candidate row, in original coordinates
    da = np.zeros((0, n))
    db = np.zeros((0, n))
    dx = np.zeros((0, k))
    de = np.zeros(0)

    # derivative rows: e'(x_k) = 0
    dxs = np.zeros((k, k))
    np.fill_diagonal(dxs, rows.epp_x)
    da = np.vstack([da, rows.dep_da[1 : k + 1]])
    db = np.vstack([db, rows.dep_db[1 : k + 1]])
    dx = np.vstack([dx, dxs])
    de = np.concatenate([de, np.zeros(k)])

    def value_row(i: int, scale: float = -1.0) -> tuple[np.ndarray, ...]:
        """Partials of scale * e(p_i); x-column only for extremum points."""
        xa = np.zeros(k)
        if 1 <= i <= k:
            xa[i - 1] = rows.ep[i]
        return scale * rows.de_da[i], scale * rows.de_db[i], scale * xa

    if with_level:
        order = [*range(1, k + 1), 0, *range(k + 1, m)]
        for i in order:
            ra, rb, rx = value_row(i)
            da = np.vstack([da, ra])
            db = np.vstack([db, rb])
            dx = np.vstack([dx, rx])
            de = np.append(de, lv[i])
    else:
        mag = np.flatnonzero(lv != 0.0)
        for i in np.flatnonzero(lv == 0.0):
            ra, rb, rx = value_row(i)
            da, db, dx = np.vstack([da, ra]), np.vstack([db, rb]), np.vstack([dx, rx])
        for i, j in zip(mag[:-1], mag[1:]):
            ia, ib, ix = value_row(i, scale=lv[j])
            ja, jb, jx = value_row(j, scale=-lv[i])
            da, db, dx = (
                np.vstack([da, ia + ja]),
                np.vstack([db, ib + jb]),
                np.vstack([dx, ix + jx]),
            )
        de = np.zeros(len(da))

    # chain rule into the transformed coordinates
    cols = [da * st.a]
    sigma = 1.0 - st.b[:-1] / st.b[1:]  # d(log b_n)/d(beta_n)
    tb = np.tril(np.ones((n, n))) * st.b[:, None]
    tb[:, 1:] *= sigma
    if spec.fixed_min_b is not None:
        tb = tb[:, 1:]
    cols.append(db @ tb)
    gaps = np.diff(st.x, prepend=0.0)
    tx = np.tril(np.ones((k, k))) * gaps
    cols.append(dx @ tx)
    if with_level:
        cols.append((de * st.e_max)[:, None])
    return np.hstack(cols)


def residuals(spec: SolveSpec, u: np.ndarray) -> np.ndarray:
    """Residual vector of the equalized-extrema system at unknowns u.

    Rows stack: the K stationarity conditions e'(x_k) = 0, the K value
    conditions level_k * e_max - e(x_k), the origin condition, and (for
    the relative measure) the endpoint condition.  The system is square.
    """
    st = _unpack(spec, u, with_level=True)
    return _residual_vector(spec, _evaluate(spec, st), st, with_level=True)


def jacobian(spec: SolveSpec, u: np.ndarray) -> np.ndarray:
    """Analytic Jacobian of `residuals` with respect to u."""
    st = _unpack(spec, u, with_level=True)
    return _jacobian_matrix(spec, _evaluate(spec, st), st, with_level=True)


# --------------------------------------------------------------------------
# Newton iteration


def _try_residual(spec: SolveSpec, u: np.ndarray, with_level: bool) -> Optional[np.ndarray]:
    try:
        st = _unpack(spec, u, with_level)
        if (
            spec.measure is ErrorMeasure.RELATIVE
            and st.x.size
            and st.x[-1] >= spec.x_end
        ):
            return None  # interior extrema must stay inside (0, x_end)
        r = _residual_vector(spec, _evaluate(spec, st), st, with_level)
    except (DomainError, ValidationError, FloatingPointError):
        return None
    return r if np.all(np.isfinite(r)) else None


def _newton(
    spec: SolveSpec, u0: np.ndarray, with_level: bool
) -> tuple[np.ndarray, float, int, bool]:
    """Damped Newton iteration; returns (u, residual_inf_norm, iters, ok).

    Far from a solution the step is regularized Levenberg-Marquardt
    style, (J'J + lam diag(J'J)) du = -J'F, with lam shrinking on
    accepted steps; near a solution lam underflows the diagonal and the
    step is plain Newton, keeping quadratic convergence.  Steps are
    capped in the log coordinates and backtracked on the merit 0.5|F|^2.
    """
    u = np.asarray(u0, dtype=float).copy()
    r = _try_residual(spec, u, with_level)
    if r is None:
        return u, math.inf, 0, False
    merit = 0.5 * float(r @ r)
    lam = 1e-3
    hi = _scan_ceiling(spec)
    for it in range(1, _MAX_ITER + 1):
        if float(np.max(np.abs(r))) <= _RESIDUAL_TOL:
            return u, float(np.max(np.abs(r))), it - 1, True
        st = _unpack(spec, u, with_level)
        if with_level and st.e_max < 1e-11:
            break  # level collapsing to zero: a degenerate basin
        if st.x.size and st.x[-1] < 1e-3 * hi:
            break  # all ripples collapsing into the origin
        jac = _jacobian_matrix(spec, _evaluate(spec, st), st, with_level)
        if not np.all(np.isfinite(jac)):
            break
        # column scaling for the LM damping; the stacked least-squares
        # form avoids squaring the (often huge) condition number
        colnorm = np.linalg.norm(jac, axis=0)
        colnorm[colnorm < 1e-6] = 1e-6
        zeros = np.zeros(jac.shape[1])
        accepted = False
        for _ in range(24):
            try:
                if lam <= 1e-12:
                    step = np.linalg.solve(jac, -r)
                else:
                    aug = np.vstack([jac, math.sqrt(lam) * np.diag(colnorm)])
                    rhs = np.concatenate([-r, zeros])
                    step = np.linalg.lstsq(aug, rhs, rcond=None)[0]
            except np.linalg.LinAlgError:
                lam = max(lam * 10.0, 1e-6)
                continue
            if not np.all(np.isfinite(step)):
                lam = max(lam * 10.0, 1e-6)
                continue
            width = float(np.max(np.abs(step)))
            if width > _STEP_CAP:
                step *= _STEP_CAP / width
            t = 1.0
            while t >= _MIN_STEP:
                cand = u + t * step
                rc = _try_residual(spec, cand, with_level)
                if rc is not None:
                    mc = 0.5 * float(rc @ rc)
                    if mc <= merit * (1.0 - 2e-4 * t):
                        u, r, merit = cand, rc, mc
                        accepted = True
                        break
                t *= 0.5
            if accepted:
                # lam ~ merit keeps the endgame quadratic; the sqrt cap
                # alone leaves lam ~ |F| and the iteration crawls on
                # ill-conditioned systems
                lam = max(lam * 0.3, 1e-14)
                lam = min(lam, 2.0 * merit)
                break
            lam = max(lam * 10.0, 1e-6)
            if lam > 1e10:
                break
        if not accepted:
            break
    return u, float(np.max(np.abs(r))), _MAX_ITER, float(np.max(np.abs(r))) <= _RESIDUAL_TOL


# --------------------------------------------------------------------------
# initial guesses


def _scan_ceiling(spec: SolveSpec) -> float:
    if spec.measure is ErrorMeasure.RELATIVE:
        return float(spec.x_end)
    return 15.0


def _seed_positions(
    spec: SolveSpec, a: np.ndarray, b: np.ndarray
) -> tuple[np.ndarray, float, bool]:
    """Extremum positions and level seeded from the trial set's own error.

    When the trial set's ripple census already matches the problem the
    found positions are used directly.  Otherwise positions fall back
    to the rate scales -- the equalized solutions place roughly two
    ripples per term, clustered around each 1/sqrt(b_n) -- and the
    returned flag marks the seed as structurally unreliable.
    """
    k = spec.extrema_count
    hi = _scan_ceiling(spec)
    s = ExpSum(tuple(zip(a.tolist(), b.tolist())))
    ext = find_extrema(s, spec.target, spec.measure, (0.0, hi))
    errs = sorted(abs(e) for _, e in ext)
    if errs:
        top = [v for v in errs if v >= 0.25 * errs[-1]]
        level = float(np.median(top))
    else:
        probes = np.geomspace(1e-3, hi, 16)
        level = 0.3 * float(np.max(np.abs(error(s, spec.target, spec.measure, probes))))
    level = max(level, 1e-12)
    if k == 0:
        return np.zeros(0), level, True

    if len(ext) >= k:
        return np.asarray([x for x, _ in ext][:k]), level, len(ext) == k
    if spec.measure is ErrorMeasure.RELATIVE:
        # relative-error ripples spread out geometrically toward x_end
        inner = min(0.45 / math.sqrt(b[-1]), 0.2 * hi)
        cand = np.geomspace(inner, 0.85 * hi, k)
    else:
        scales = np.sort(1.0 / np.sqrt(b))
        cand = np.sort(np.concatenate([0.45 * scales, 1.35 * scales]))[:k]
    return _force_increasing(cand), level, False


def _cold_coefficients(spec: SolveSpec) -> tuple[np.ndarray, np.ndarray]:
    n = spec.n
    base = spec.fixed_min_b if spec.fixed_min_b is not None else 0.35 * max(
        spec.target.tail_power, 1
    ) + 0.35
    ratio = 10.0 if spec.measure is ErrorMeasure.ABSOLUTE else 5.0
    b = base * ratio ** np.arange(n)
    decay = 0.38
    a = decay ** np.arange(n)
    a *= spec.target.eval(0.0) / np.sum(a)
    return a, b


def _bootstrap_amplitudes(
    spec: SolveSpec, b: np.ndarray, x: np.ndarray
) -> Optional[tuple[np.ndarray, float]]:
    """Least-squares (a, e_max) satisfying the value conditions at x.

    With the rates and positions held fixed, the value, origin, and
    endpoint conditions are linear in the amplitudes and the level;
    solving them makes the seed self-consistent before the first Newton
    step.  Returns None when the fit leaves the feasible cone.
    """
    pts = [0.0, *x]
    if spec.measure is ErrorMeasure.RELATIVE:
        pts.append(float(spec.x_end))
    p = np.asarray(pts)
    lv = _condition_levels(spec)
    with np.errstate(under="ignore"):
        cols = np.exp(-np.outer(p * p, b))
    tv = np.asarray(spec.target.eval(p), dtype=float)
    if spec.measure is ErrorMeasure.RELATIVE:
        cols = cols / tv[:, None]
        rhs = np.ones_like(tv)
    else:
        rhs = tv
    mat = np.hstack([cols, -lv[:, None]])
    try:
        z = np.linalg.lstsq(mat, rhs, rcond=None)[0]
    except np.linalg.LinAlgError:
        return None
    a, e_max = z[:-1], float(z[-1])
    if not np.all(np.isfinite(a)) or not math.isfinite(e_max):
        return None
    if e_max <= 0.0 or np.any(a <= 0.0):
        return None
    return a, e_max


def _skeletons(
    spec: SolveSpec, prior: Sequence[MinimaxSolution]
) -> list[tuple[np.ndarray, np.ndarray]]:
    """Candidate (a, b) profiles for this size, most trusted first.

    A same-size prior is copied as-is.  Smaller priors are grown two
    ways -- log-profile extrapolation and tail padding -- because either
    one can land outside the equalized basin depending on the target.
    """
    prior = sorted(prior, key=lambda s: s.spec.n)
    if not prior:
        return [_cold_coefficients(spec)]
    newest = prior[-1]
    if newest.spec.n == spec.n:
        return [(np.asarray(newest.expsum.a), np.asarray(newest.expsum.b))]
    out = []
    if len(prior) >= 2 and prior[-2].spec.n < newest.spec.n:
        out.append(_extrapolate_pair(prior[-2], newest, spec.n))
    out.append(_pad_terms(newest, spec.n))
    return out


def _assemble_guess(
    spec: SolveSpec,
    prior: Sequence[MinimaxSolution],
    a: np.ndarray,
    b: np.ndarray,
    use_mapped: bool = False,
    force_bootstrap: bool = False,
) -> np.ndarray:
    a = np.asarray(a, dtype=float).copy()
    b = np.asarray(b, dtype=float).copy()
    if prior and spec.fixed_min_b is not None:
        b = np.maximum(b, spec.fixed_min_b)
        b[0] = spec.fixed_min_b
        b = _force_increasing(b)
    x, level, census_ok = _seed_positions(spec, a, b)
    if not census_ok and use_mapped:
        mapped = _map_positions(prior, spec.extrema_count)
        if mapped is not None:
            x = mapped
    if spec.measure is ErrorMeasure.RELATIVE:
        # keep seeded positions strictly inside (0, x_end)
        cap = spec.x_end * (1.0 - 1e-4)
        for i in range(len(x) - 1, -1, -1):
            x[i] = min(x[i], cap)
            cap = x[i] * (1.0 - 1e-4)
    if not census_ok or force_bootstrap:
        # refit the amplitudes so the value conditions start out
        # consistent; mandatory when the positions do not come from
        # real ripples
        fit = _bootstrap_amplitudes(spec, b, x)
        if fit is not None:
            a, level = fit
    return _pack(spec, a, b, x, level, with_level=True)


def initial_guess(spec: SolveSpec, prior: Sequence[MinimaxSolution] = ()) -> np.ndarray:
    """Best-effort starting vector, from heuristics or prior solutions.

    With no prior the rate skeleton comes from a geometric pattern;
    with priors the (log a, log b) profiles are carried over or
    extrapolated along the fractional term index.  Extremum positions
    are then re-seeded from the trial coefficients' actual error curve
    (falling back to the rate scales), and the amplitudes and level are
    re-fit linearly against the value conditions, which is what makes
    the continuation indifferent to the ripple census changing with N.
    """
    a, b = _skeletons(spec, prior)[0]
    return _assemble_guess(spec, prior, a, b)


def _seed_candidates(
    spec: SolveSpec, prior: Sequence[MinimaxSolution] = ()
) -> list[np.ndarray]:
    """Distinct starting vectors, most trusted first.

    Each skeleton contributes its censused-position seed plus a
    bootstrap-refit variant (the census path trusts the trial set's own
    ripple level, which can drift off); the quantile-mapped positions
    offer one more basin when prior positions are usable.
    """
    sks = _skeletons(spec, prior)
    cands: list[np.ndarray] = []
    alts = [
        _assemble_guess(spec, prior, a, b, force_bootstrap=boot)
        for a, b in sks
        for boot in (False, True)
    ]
    if prior:
        a, b = sks[0]
        alts.append(_assemble_guess(spec, prior, a, b, use_mapped=True))
    for alt in alts:
        if not any(np.allclose(alt, c, rtol=0.0, atol=1e-12) for c in cands):
            cands.append(alt)
    return cands


def _force_increasing(v: np.ndarray) -> np.ndarray:
    out = v.copy()
    for i in range(1, len(out)):
        if out[i] <= out[i - 1]:
            out[i] = out[i - 1] * (1.0 + 1e-6)
    return out


def _extend_interp(t: np.ndarray, tp: np.ndarray, yp: np.ndarray) -> np.ndarray:
    """np.interp with linear extrapolation past the sample ends."""
    y = np.interp(t, tp, yp)
    if len(tp) >= 2:
        lo = t < tp[0]
        y[lo] = yp[0] + (t[lo] - tp[0]) * (yp[1] - yp[0]) / (tp[1] - tp[0])
        hi = t > tp[-1]
        y[hi] = yp[-1] + (t[hi] - tp[-1]) * (yp[-1] - yp[-2]) / (tp[-1] - tp[-2])
    return y


def _map_positions(prior: Sequence[MinimaxSolution], k: int) -> Optional[np.ndarray]:
    """Ripple positions for a K-extremum problem mapped from prior solutions.

    Positions are treated as samples of a smooth profile over the
    fractional ripple index, like the coefficient profiles: quantile
    interpolation reshapes the newest solution's extrema to the new
    count, and a second prior adds a linear trend so the profile keeps
    drifting the way it did between the priors.
    """
    usable = [s for s in prior if len(s.extrema) >= 2]
    if not usable or k < 1:
        return None

    def profile(sol: MinimaxSolution) -> np.ndarray:
        kp = len(sol.extrema)
        tp = (np.arange(kp) + 0.5) / kp
        return _extend_interp(t_tgt, tp, np.log(np.asarray(sol.extrema)))

    t_tgt = (np.arange(k) + 0.5) / k
    newest = usable[-1]
    y = profile(newest)
    if len(usable) >= 2:
        older = usable[-2]
        dk = len(newest.extrema) - len(older.extrema)
        if dk > 0:
            frac = (k - len(newest.extrema)) / dk
            y = y + (y - profile(older)) * frac
    return _force_increasing(np.exp(y))


def _origin_sum(spec: SolveSpec, em_est: float) -> float:
    """Sum of amplitudes implied by the origin condition at level em_est."""
    t0 = spec.target.eval(0.0)
    if spec.measure is ErrorMeasure.RELATIVE:
        return t0 * (1.0 + spec.origin_level * em_est)
    return t0 + spec.origin_level * em_est


def _pad_terms(sol: MinimaxSolution, n: int) -> tuple[np.ndarray, np.ndarray]:
    a = list(sol.expsum.a)
    b = list(sol.expsum.b)
    while len(a) < n:
        a_ratio = a[-1] / a[-2] if len(a) >= 2 else 0.33
        b_ratio = (b[-1] / b[-2]) ** 1.25 if len(b) >= 2 else 18.0
        a.append(a[-1] * a_ratio)
        b.append(b[-1] * b_ratio)
    av = np.asarray(a[:n])
    av *= _origin_sum(sol.spec, 0.35 * sol.e_max) / av.sum()
    return av, np.asarray(b[:n])


def _extrapolate_pair(
    older: MinimaxSolution, newer: MinimaxSolution, n: int
) -> tuple[np.ndarray, np.ndarray]:
    """Extrapolate log-coefficient profiles along the fractional index.

    Each solution's (log a_i, log b_i) is viewed as samples of a smooth
    profile at positions t = (i - 1/2) / N; the profile for the new N is
    linearly extrapolated from the last two solutions at matching t.
    """

    def profile(sol: MinimaxSolution) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        m = sol.spec.n
        t = (np.arange(m) + 0.5) / m
        return t, np.log(np.asarray(sol.expsum.a)), np.log(np.asarray(sol.expsum.b))

    t_old, la_old, lb_old = profile(older)
    t_new, la_new, lb_new = profile(newer)
    t_tgt = (np.arange(n) + 0.5) / n
    la_o = np.interp(t_tgt, t_old, la_old)
    lb_o = np.interp(t_tgt, t_old, lb_old)
    la_n = np.interp(t_tgt, t_new, la_new)
    lb_n = np.interp(t_tgt, t_new, lb_new)
    frac = (n - older.spec.n) / max(newer.spec.n - older.spec.n, 1)
    a = np.exp(la_o + (la_n - la_o) * frac)
    b = np.exp(lb_o + (lb_n - lb_o) * frac)
    em_est = newer.e_max * (newer.e_max / older.e_max) ** frac
    a *= _origin_sum(newer.spec, em_est) / a.sum()
    return a, _force_increasing(b)


# --------------------------------------------------------------------------
# solve and sweeps


def _self_check(spec: SolveSpec, sol: MinimaxSolution) -> bool:
    hi = _scan_ceiling(spec)
    if spec.measure is ErrorMeasure.ABSOLUTE and sol.extrema:
        hi = max(hi, 1.3 * sol.extrema[-1] + 1.0)
    ext = find_extrema(sol.expsum, spec.target, spec.measure, (0.0, hi))
    if len(ext) != spec.extrema_count:
        return False
    measured = max_error(sol.expsum, spec.target, spec.measure, (0.0, hi))
    if abs(measured / sol.e_max - 1.0) > 1e-6:
        return False
    if spec.variant.kind is Kind.APPROXIMATION:
        return True
    # a converged system can still sit in a wrong basin whose error
    # crosses zero; a bound must stay one-sided
    grid = np.linspace(0.0, hi, 4000)
    e = np.asarray(error(sol.expsum, spec.target, spec.measure, grid))
    slack = 1e-9 * sol.e_max
    if spec.variant.kind is Kind.LOWER_BOUND:
        return bool(np.all(e <= slack))
    return bool(np.all(e >= -slack))


def _perturbed(u: np.ndarray, attempt: int) -> np.ndarray:
    rng = np.random.default_rng(1009 + 97 * attempt)
    eta = np.clip(rng.standard_normal(u.size), -3.0, 3.0)
    return u + np.log1p(0.05 * eta)


def _attempt_solve(
    spec: SolveSpec, seeds, with_level: bool
) -> tuple[Optional[MinimaxSolution], float]:
    if isinstance(seeds, np.ndarray):
        seeds = [seeds]
    trials = [
        u0 if attempt == 0 else _perturbed(u0, attempt + 31 * si)
        for attempt in range(_RESTARTS + 1)
        for si, u0 in enumerate(seeds)
    ]
    best = math.inf
    for u in trials:
        u_fin, res, iters, ok = _newton(spec, u, with_level)
        best = min(best, res)
        if not ok:
            continue
        st = _unpack(spec, u_fin, with_level)
        e_max = st.e_max
        if not with_level:
            lv = _condition_levels(spec)
            rows = _evaluate(spec, st)
            mag = np.flatnonzero(lv != 0.0)
            e_max = float(
                np.median(np.abs(rows.e[mag]) / np.abs(lv[mag]))
            )
        try:
            sol = MinimaxSolution(
                expsum=ExpSum(tuple(zip(st.a.tolist(), st.b.tolist()))),
                e_max=e_max,
                extrema=tuple(st.x.tolist()),
                spec=spec,
                iterations=iters,
                residual_norm=res,
            )
        except ValidationError:
            continue
        if _self_check(spec, sol):
            return sol, best
    return None, best


def _is_uniform(spec: SolveSpec) -> bool:
    return all(w == 1.0 for w in spec.weights)


def _is_backbone(spec: SolveSpec) -> bool:
    return (
        spec.variant.kind is Kind.APPROXIMATION
        and spec.variant.origin is Origin.WEIGHTED_AT_ORIGIN
        and _is_uniform(spec)
    )


def _sibling(
    spec: SolveSpec, variant, n: int, weights=None, x_end: Optional[float] = None
) -> SolveSpec:
    return SolveSpec(
        target=spec.target,
        measure=spec.measure,
        variant=variant,
        n=n,
        weights=weights,
        x_end=spec.x_end if x_end is None else x_end,
    )


def _seed_from_backbone(spec: SolveSpec, base: MinimaxSolution) -> Optional[np.ndarray]:
    """Start vector for a variant, built on the plain approximation.

    The bound and pinned-origin solutions of the same size share the
    approximation's ripple skeleton: they are O(e_max) deformations of
    it.  Positions reuse the approximation's extrema (dropping trailing
    ones when the variant has fewer), rates carry over (re-pinning the
    slowest one when the spec fixes it), and amplitudes are re-fit
    linearly against the variant's own level pattern.
    """
    k = spec.extrema_count
    x = np.asarray(base.extrema[:k])
    if len(x) < k:
        return None
    b = np.asarray(base.expsum.b)
    if spec.fixed_min_b is not None:
        b = np.maximum(b, spec.fixed_min_b)
        b[0] = spec.fixed_min_b
        b = _force_increasing(b)
    fit = _bootstrap_amplitudes(spec, b, x)
    if fit is None:
        a = np.asarray(base.expsum.a)
        level = 1.5 * base.e_max
    else:
        a, level = fit
    try:
        return _pack(spec, a, b, x, level, with_level=True)
    except ContractViolation:
        return None


def _seed_from_solution(spec: SolveSpec, sol: MinimaxSolution) -> Optional[np.ndarray]:
    """Start vector at spec from a solved sibling of the same size.

    Used for continuation in x_end: the ripple positions carry over
    unscaled (Newton drifts them outward itself; pre-scaling them lands
    in the wrong basin), clipped strictly inside the new interval, and
    the amplitudes and level are re-fit against the value conditions.
    """
    a = np.asarray(sol.expsum.a)
    b = np.asarray(sol.expsum.b)
    x = np.asarray(sol.extrema, dtype=float)
    if x.size != spec.extrema_count:
        return None
    if spec.measure is ErrorMeasure.RELATIVE:
        cap = spec.x_end * (1.0 - 1e-4)
        for i in range(len(x) - 1, -1, -1):
            x[i] = min(x[i], cap)
            cap = x[i] * (1.0 - 1e-4)
    fit = _bootstrap_amplitudes(spec, b, x)
    level = sol.e_max
    if fit is not None:
        a, level = fit
    try:
        return _pack(spec, a, b, x, level, with_level=True)
    except ContractViolation:
        return None


def _solve_backbone_chain(spec: SolveSpec) -> tuple[list[MinimaxSolution], float]:
    """Solve the plain approximation at every size 1..spec.n.

    Returns the solutions found (the list is short when the chain dies
    early) together with the best residual seen.
    """
    sols: list[MinimaxSolution] = []
    best = math.inf
    for m in range(1, spec.n + 1):
        sub = _sibling(spec, spec.variant, m)
        sol, res = _attempt_solve(sub, _seed_candidates(sub, sols[-2:]), True)
        best = min(best, res)
        if sol is None and sols:
            # retry from heuristics alone before giving up
            sol, res = _attempt_solve(sub, _seed_candidates(sub), True)
            best = min(best, res)
        if sol is None:
            break
        sols.append(sol)
    return sols, best


def _solve_uniform(spec: SolveSpec) -> tuple[Optional[MinimaxSolution], float]:
    """Solve a uniform-weight spec, chaining through smaller problems."""
    if spec.measure is ErrorMeasure.RELATIVE and spec.x_end > _XE_ANCHOR:
        # on wide intervals the rate-scale seeds walk into the level->0
        # family, so anchor the chain where they behave and continue
        # outward in x_end
        sol, best = _solve_uniform(
            _sibling(spec, spec.variant, spec.n, x_end=_XE_ANCHOR)
        )
        xe = _XE_ANCHOR
        while sol is not None and xe < spec.x_end:
            xe = min(1.4 * xe, spec.x_end)
            stage = _sibling(spec, spec.variant, spec.n, x_end=xe)
            u0 = _seed_from_solution(stage, sol)
            if u0 is None:
                sol = None
                break
            sol, res = _attempt_solve(stage, u0, True)
            best = min(best, res)
        if sol is not None:
            return sol, best
        # otherwise try the direct chain at the target x_end

    if _is_backbone(spec):
        sols, best = _solve_backbone_chain(spec)
        return (sols[-1] if len(sols) == spec.n else None), best

    backbone = _sibling(spec, VariantKind.approximation(), spec.n)
    bases, backbone_best = _solve_backbone_chain(backbone)
    best = math.inf if bases else backbone_best
    if len(bases) == spec.n:
        u0 = _seed_from_backbone(spec, bases[-1])
        if u0 is not None:
            sol, res = _attempt_solve(spec, u0, True)
            best = min(best, res)
            if sol is not None:
                return sol, best
    # the same-size jump can miss the basin; walk up within the variant,
    # borrowing the backbone skeleton of each size as an extra seed
    priors: list[MinimaxSolution] = []
    for m in range(1, spec.n + 1):
        sub = _sibling(spec, spec.variant, m)
        seeds = []
        if m <= len(bases) and m < spec.n:
            u0 = _seed_from_backbone(sub, bases[m - 1])
            if u0 is not None:
                seeds.append(u0)
        seeds.extend(_seed_candidates(sub, priors))
        sol, res = _attempt_solve(sub, seeds, True)
        best = min(best, res)
        if sol is None:
            break
        priors = [*priors[-1:], sol]
    else:
        return priors[-1], best
    # fall back to an in-family cold start
    sol, res = _attempt_solve(spec, _seed_candidates(spec), True)
    return sol, min(best, res)


def solve(
    spec: SolveSpec,
    guess: Optional[np.ndarray] = None,
    *,
    eliminate_e_max: bool = False,
) -> MinimaxSolution:
    """Solve one equalized-extrema problem to residual_norm <= 1e-12.

    Without a guess, the plain approximation of each size up to spec.n
    is solved as a continuation backbone; bounds and pinned-origin
    variants are then seeded from the same-size approximation, and
    non-uniform weights are walked in from the uniform solution.  With
    `eliminate_e_max` the level is removed from the unknowns by chaining
    the magnitude conditions pairwise; this is an internal-consistency
    variant for the absolute measure only.
    """
    if eliminate_e_max:
        if spec.measure is not ErrorMeasure.ABSOLUTE:
            raise ValidationError("eliminating the level is an absolute-measure mode")
        if guess is not None:
            u0 = np.asarray(guess, dtype=float)
            if u0.shape == (_sizes(spec, True),):
                u0 = u0[:-1]
            sol, best = _attempt_solve(spec, u0, with_level=False)
        else:
            sol, best = _attempt_solve(
                spec, initial_guess(spec)[:-1], with_level=False
            )
            if sol is None:
                # consistency fallback: start from the kept-level solution
                full = solve(spec)
                u0 = pack(
                    spec, full.expsum.a, full.expsum.b, full.extrema, full.e_max
                )[:-1]
                sol, best = _attempt_solve(spec, u0, with_level=False)
        if sol is None:
            raise SolverFailure(
                f"no convergence for {spec.variant.kind.value} N={spec.n} "
                f"(eliminated level); best residual {best:.3e}",
                best_residual=best,
            )
        return sol

    if guess is not None:
        sol, best = _attempt_solve(spec, np.asarray(guess, dtype=float), True)
        if sol is None:
            raise SolverFailure(
                f"no convergence for {spec.variant.kind.value} N={spec.n} "
                f"from the supplied guess; best residual {best:.3e}",
                best_residual=best,
            )
        return sol

    uniform = spec if _is_uniform(spec) else _sibling(spec, spec.variant, spec.n)
    sol, best = _solve_uniform(uniform)
    if sol is None:
        raise SolverFailure(
            f"no convergence for uniform {uniform.variant.kind.value} N={uniform.n}; "
            f"best residual {best:.3e}",
            best_residual=best,
        )
    if _is_uniform(spec):
        return sol

    # weight continuation: walk from the uniform solution to the target
    target_w = np.asarray(spec.weights)
    for frac in (1.0, 0.5, 0.25):
        steps = np.arange(frac, 1.0 + 1e-9, frac)
        cur = sol
        failed = False
        for f in steps:
            w = tuple(1.0 + f * (target_w - 1.0))
            stage = _sibling(spec, spec.variant, spec.n, weights=w)
            cand, best = _attempt_solve(stage, _seed_candidates(stage, [cur]), True)
            if cand is None:
                failed = True
                break
            cur = cand
        if not failed:
            return cur
    raise SolverFailure(
        f"weight continuation failed for {spec.variant.kind.value} N={spec.n}; "
        f"best residual {best:.3e}",
        best_residual=best,
    )


@dataclass(frozen=True)
class SweepOutcome:
    """One sweep entry: either a solution or the failure that replaced it."""

    spec: SolveSpec
    solution: Optional[MinimaxSolution]
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.solution is not None


def sweep(specs: Sequence[SolveSpec]) -> list[SweepOutcome]:
    """Solve a family of related specs with continuation between them.

    Specs must share target, measure, and variant, with non-decreasing
    term counts; each solve is warm-started from the previous successes.
    Failures are recorded per spec without aborting the rest.
    """
    specs = list(specs)
    if not specs:
        return []
    head = specs[0]
    for s in specs[1:]:
        if (
            s.target.c != head.target.c
            or s.measure is not head.measure
            or s.variant != head.variant
        ):
            raise ValidationError("sweep specs must share target, measure, variant")
    if any(b.n < a.n for a, b in zip(specs, specs[1:])):
        raise ValidationError("sweep specs must have non-decreasing term counts")

    outcomes: list[SweepOutcome] = []
    priors: list[MinimaxSolution] = []
    for s in specs:
        try:
            if priors:
                guess = initial_guess(s, priors)
                sol, _ = _attempt_solve(s, guess, True)
                if sol is None:
                    sol = solve(s)  # cold continuation as fallback
            else:
                sol = solve(s)
            outcomes.append(SweepOutcome(s, sol))
            priors = [p for p in priors if p.spec.n != sol.spec.n]
            priors.append(sol)
            priors = priors[-2:]
        except SolverFailure as exc:
            outcomes.append(SweepOutcome(s, None, str(exc)))
    return outcomes
