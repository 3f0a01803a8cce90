"""Scan-based extrema location, error measurement, and certification."""

from __future__ import annotations

import numpy as np
import pytest
from conftest import ABS_APPROX, CHIANI_N2, RECT_N2, REL_N20_X6

from qexpsum import (
    ErrorMeasure,
    ExpSum,
    MinimaxSolution,
    SolveSpec,
    TargetPoly,
    ValidationError,
    VariantKind,
    certify,
    certify_set,
    error,
    error_prime,
    find_extrema,
    max_error,
    profile,
)

IDENT = TargetPoly.identity()
ABS = ErrorMeasure.ABSOLUTE
REL = ErrorMeasure.RELATIVE
HALF_TERM = ExpSum(((0.5, 0.5),))


def solved(s: ExpSum, n: int) -> MinimaxSolution:
    """Wrap a frozen absolute-measure set in a solution container."""
    spec = SolveSpec(IDENT, ABS, VariantKind.approximation(), n)
    e_max = abs(error(s, IDENT, ABS, 0.0))  # origin rides at -e_max
    xs = tuple(x for x, _ in find_extrema(s, IDENT, ABS, (0.0, 15.0)))
    return MinimaxSolution(s, e_max, xs, spec, iterations=0, residual_norm=0.0)


class TestFindExtrema:
    def test_two_term_set_alternates(self):
        ext = find_extrema(ABS_APPROX[2], IDENT, ABS, (0.0, 15.0))
        assert len(ext) == 4
        assert [x for x, _ in ext] == sorted(x for x, _ in ext)
        assert [int(np.sign(e)) for _, e in ext] == [1, -1, 1, -1]

    def test_twenty_term_relative_set(self):
        ext = find_extrema(REL_N20_X6, IDENT, REL, (0.0, 6.0))
        assert len(ext) == 39
        # the narrowest ripple hides below x = 1e-5
        assert ext[0][0] < 1e-5

    def test_single_term_single_interior_max(self):
        ext = find_extrema(HALF_TERM, IDENT, ABS, (0.0, 15.0))
        assert len(ext) == 1
        assert ext[0][1] > 0.0
        assert error(HALF_TERM, IDENT, ABS, 0.0) == 0.0

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_stationary_at_reported_points(self, n):
        for x, _ in find_extrema(ABS_APPROX[n], IDENT, ABS, (0.0, 15.0)):
            assert abs(error_prime(ABS_APPROX[n], IDENT, ABS, x)) <= 1e-10

    def test_stationary_for_relative_set(self):
        for x, _ in find_extrema(REL_N20_X6, IDENT, REL, (0.0, 6.0)):
            assert abs(error_prime(REL_N20_X6, IDENT, REL, x)) <= 1e-10

    def test_degenerate_range_is_empty(self):
        assert find_extrema(HALF_TERM, IDENT, ABS, (2.0, 2.0)) == []

    @pytest.mark.parametrize("rng", [(3.0, 1.0), (-1.0, 1.0), (0.0, float("inf"))])
    def test_rejects_bad_range(self, rng):
        with pytest.raises(ValidationError):
            find_extrema(HALF_TERM, IDENT, ABS, rng)


class TestMaxError:
    def test_chiani_comparison_value(self):
        d = max_error(CHIANI_N2, IDENT, ABS, (0.0, 15.0))
        assert abs(d - 1.667e-1) <= 1e-4

    def test_relative_set_absolute_ceiling(self):
        assert max_error(REL_N20_X6, IDENT, ABS, (0.0, 15.0)) <= 1.416e-6

    def test_relative_set_relative_ceiling(self):
        r = max_error(REL_N20_X6, IDENT, REL, (0.0, 6.0))
        assert r <= 2.831e-6
        assert r > 2.83e-6  # level is genuinely attained

    def test_two_term_published_level(self):
        d = max_error(ABS_APPROX[2], IDENT, ABS, (0.0, 15.0))
        np.testing.assert_allclose(d, 9.5458502629e-3, rtol=1e-9)

    def test_endpoint_only_range(self):
        assert max_error(HALF_TERM, IDENT, ABS, (0.0, 0.0)) == 0.0

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_tail_stays_under_level(self, n):
        sol = solved(ABS_APPROX[n], n)
        tail = max_error(ABS_APPROX[n], IDENT, ABS, (sol.extrema[-1], 50.0))
        assert tail <= sol.e_max * (1.0 + 1e-9)


class TestCertify:
    def test_three_term_solution_passes_everything(self):
        report = certify(solved(ABS_APPROX[3], 3))
        assert report.passed
        assert [c.passed for c in report.checks] == [True] * 5

    def test_perturbed_amplitude_breaks_ripple(self):
        sol = solved(ABS_APPROX[3], 3)
        terms = list(ABS_APPROX[3].terms)
        terms[0] = (terms[0][0] + 1e-3, terms[0][1])
        bad = MinimaxSolution(
            ExpSum(tuple(terms)), sol.e_max, sol.extrema, sol.spec, 0, 0.0
        )
        report = certify(bad)
        by_name = {c.name: c for c in report.checks}
        assert not by_name["equal_ripple"].passed
        assert not report.passed

    def test_report_renders_one_line_per_check(self):
        report = certify(solved(ABS_APPROX[2], 2))
        lines = str(report).splitlines()
        assert len(lines) == 5
        assert all("margin=" in ln for ln in lines)

    def test_rectangle_rule_is_a_bound_but_not_minimax(self):
        spec = SolveSpec(IDENT, ABS, VariantKind.upper_bound(), 2)
        report = certify_set(RECT_N2, spec)
        by_name = {c.name: c for c in report.checks}
        assert by_name["one_sided"].passed
        assert not by_name["equal_ripple"].passed
        assert not report.passed

    def test_undershooting_set_fails_one_sidedness(self):
        # undershoots Q at the origin by 1/6, so it cannot be an upper bound
        spec = SolveSpec(IDENT, ABS, VariantKind.upper_bound(), 2)
        report = certify_set(CHIANI_N2, spec)
        by_name = {c.name: c for c in report.checks}
        assert not by_name["one_sided"].passed

    def test_measured_max_attained_at_reported_extrema(self):
        sol = solved(ABS_APPROX[4], 4)
        measured = max_error(ABS_APPROX[4], IDENT, ABS, (0.0, 15.0))
        assert abs(measured / sol.e_max - 1.0) <= 1e-6
        ripples = [abs(error(ABS_APPROX[4], IDENT, ABS, x)) for x in sol.extrema]
        np.testing.assert_allclose(ripples, sol.e_max, rtol=1e-6)


class TestProfile:
    def test_rows_and_maxima(self):
        p = profile(ABS_APPROX[2], IDENT, (0.0, 6.0), measure=ABS, points=500)
        assert len(p.grid) >= 500
        xs = [row[0] for row in p.grid]
        assert xs == sorted(xs)
        assert xs[0] == 0.0 and xs[-1] == 6.0
        np.testing.assert_allclose(p.measured_d_max, 9.5458502629e-3, rtol=1e-6)
        assert p.r_capped_at is None
        assert len(p.extrema) == 4

    def test_relative_cap_reported_when_target_underflows(self):
        from qexpsum import q

        p = profile(HALF_TERM, IDENT, (0.0, 40.0), measure=ABS, points=400)
        assert p.r_capped_at is not None
        # the cap is the last grid point where the target is representable
        assert 36.0 < p.r_capped_at < 37.2
        assert q(p.r_capped_at) > 1e-300
        tail_rows = [row for row in p.grid if row[0] > p.r_capped_at]
        assert tail_rows and all(row[4] is None for row in tail_rows)
        assert np.isfinite(p.measured_r_max)

    def test_extrema_bracket_sign_changes(self):
        p = profile(ABS_APPROX[3], IDENT, (0.0, 15.0), measure=ABS, points=300)
        for x, e, sign in p.extrema:
            assert sign == int(np.sign(e))
            assert abs(error_prime(ABS_APPROX[3], IDENT, ABS, x)) <= 1e-10
