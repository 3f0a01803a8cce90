"""Problem descriptions: variants, extremum bookkeeping, solution container."""

from __future__ import annotations

import numpy as np
import pytest

from qexpsum import (
    ErrorMeasure,
    ExpSum,
    Kind,
    MinimaxSolution,
    Origin,
    SolveSpec,
    TargetPoly,
    ValidationError,
    VariantKind,
)

IDENT = TargetPoly.identity()
QAM = TargetPoly((0.0, 2.0, -1.0))
GOOD_SUM = ExpSum(((0.3, 0.8), (0.12, 16.0)))


def abs_spec(variant: VariantKind, n: int = 2, **kw) -> SolveSpec:
    return SolveSpec(IDENT, ErrorMeasure.ABSOLUTE, variant, n, **kw)


def rel_spec(variant: VariantKind, n: int = 2, x_end: float = 6.0, **kw) -> SolveSpec:
    return SolveSpec(IDENT, ErrorMeasure.RELATIVE, variant, n, x_end=x_end, **kw)


class TestVariantKind:
    def test_factories(self):
        assert VariantKind.approximation().origin is Origin.WEIGHTED_AT_ORIGIN
        assert (
            VariantKind.approximation(Origin.ZERO_AT_ORIGIN).origin
            is Origin.ZERO_AT_ORIGIN
        )
        assert VariantKind.lower_bound().kind is Kind.LOWER_BOUND
        assert VariantKind.upper_bound().origin is Origin.ZERO_AT_ORIGIN

    @pytest.mark.parametrize(
        "kind, origin",
        [
            (Kind.LOWER_BOUND, Origin.ZERO_AT_ORIGIN),
            (Kind.UPPER_BOUND, Origin.WEIGHTED_AT_ORIGIN),
        ],
    )
    def test_bounds_pin_their_origin(self, kind, origin):
        with pytest.raises(ValidationError):
            VariantKind(kind, origin)


class TestCounts:
    @pytest.mark.parametrize("n", [1, 2, 3, 6])
    def test_absolute_extrema_counts(self, n):
        assert abs_spec(VariantKind.approximation(), n).extrema_count == 2 * n
        assert (
            abs_spec(VariantKind.approximation(Origin.ZERO_AT_ORIGIN), n).extrema_count
            == 2 * n
        )
        assert abs_spec(VariantKind.lower_bound(), n).extrema_count == 2 * n
        assert abs_spec(VariantKind.upper_bound(), n).extrema_count == 2 * n - 1

    @pytest.mark.parametrize("n", [1, 2, 3, 6])
    def test_relative_extrema_counts(self, n):
        assert rel_spec(VariantKind.approximation(), n).extrema_count == 2 * n - 1
        assert rel_spec(VariantKind.lower_bound(), n).extrema_count == 2 * n - 1
        assert rel_spec(VariantKind.upper_bound(), n).extrema_count == 2 * n - 2

    def test_system_sizes(self):
        assert abs_spec(VariantKind.approximation(), 3).system_size == 13
        assert abs_spec(VariantKind.lower_bound(), 3).system_size == 13
        assert abs_spec(VariantKind.upper_bound(), 3).system_size == 12
        assert rel_spec(VariantKind.approximation(), 3).system_size == 12
        assert rel_spec(VariantKind.upper_bound(), 3).system_size == 11

    def test_internal_sizes(self):
        # n amplitudes + free rates + K extremum positions + the level
        assert abs_spec(VariantKind.approximation(), 2).internal_size == 2 + 2 + 4 + 1
        assert abs_spec(VariantKind.upper_bound(), 2).internal_size == 2 + 1 + 3 + 1
        assert rel_spec(VariantKind.upper_bound(), 2).internal_size == 2 + 1 + 2 + 1

    def test_weight_counts(self):
        assert len(abs_spec(VariantKind.approximation(), 2).weights) == 5
        assert len(rel_spec(VariantKind.approximation(), 2).weights) == 5
        assert len(rel_spec(VariantKind.upper_bound(), 1).weights) == 2


class TestLevels:
    def test_approximation_alternates(self):
        lv = abs_spec(VariantKind.approximation(), 2).value_levels()
        np.testing.assert_array_equal(lv, [1.0, -1.0, 1.0, -1.0])

    def test_lower_bound_touches_then_dips(self):
        lv = abs_spec(VariantKind.lower_bound(), 2).value_levels()
        np.testing.assert_array_equal(lv, [0.0, -1.0, 0.0, -1.0])

    def test_upper_bound_peaks_then_touches(self):
        lv = abs_spec(VariantKind.upper_bound(), 2).value_levels()
        np.testing.assert_array_equal(lv, [1.0, 0.0, 1.0])

    def test_weights_scale_levels(self):
        w = (1.0, 0.5, 1.0, 0.25, 0.75)
        lv = abs_spec(VariantKind.approximation(), 2, weights=w).value_levels()
        np.testing.assert_array_equal(lv, [0.5, -1.0, 0.25, -0.75])

    def test_origin_level(self):
        w = (0.5, 1.0, 1.0, 1.0, 1.0)
        assert abs_spec(VariantKind.approximation(), 2, weights=w).origin_level == -0.5
        zero = VariantKind.approximation(Origin.ZERO_AT_ORIGIN)
        assert abs_spec(zero, 2).origin_level == 0.0
        assert abs_spec(VariantKind.upper_bound(), 2).origin_level == 0.0

    def test_endpoint_level(self):
        assert abs_spec(VariantKind.approximation(), 2).endpoint_level is None
        assert rel_spec(VariantKind.approximation(), 2).endpoint_level == -1.0
        assert rel_spec(VariantKind.lower_bound(), 2).endpoint_level == -1.0
        assert rel_spec(VariantKind.upper_bound(), 2).endpoint_level == 1.0


class TestSpecValidation:
    @pytest.mark.parametrize("bad", [0, 26, 2.5, "3"])
    def test_n_bounds(self, bad):
        with pytest.raises(ValidationError):
            abs_spec(VariantKind.approximation(), bad)

    def test_numpy_integer_n_accepted(self):
        assert abs_spec(VariantKind.approximation(), np.int64(3)).n == 3

    def test_relative_needs_x_end(self):
        with pytest.raises(ValidationError):
            SolveSpec(IDENT, ErrorMeasure.RELATIVE, VariantKind.approximation(), 2)

    @pytest.mark.parametrize("xe", [0.4, 20.5, float("inf")])
    def test_x_end_outside_band(self, xe):
        with pytest.raises(ValidationError):
            rel_spec(VariantKind.approximation(), 2, x_end=xe)

    def test_x_end_band_edges(self):
        assert rel_spec(VariantKind.approximation(), 2, x_end=0.5).x_end == 0.5
        assert rel_spec(VariantKind.approximation(), 2, x_end=20).x_end == 20.0

    def test_absolute_rejects_x_end(self):
        with pytest.raises(ValidationError):
            SolveSpec(
                IDENT, ErrorMeasure.ABSOLUTE, VariantKind.approximation(), 2, x_end=6.0
            )

    def test_relative_rejects_sign_changing_target(self):
        t = TargetPoly((0.0, -1.0, 2.0))
        with pytest.raises(ValidationError):
            SolveSpec(t, ErrorMeasure.RELATIVE, VariantKind.approximation(), 2, x_end=6.0)
        # the same polynomial is fine in the absolute measure
        SolveSpec(t, ErrorMeasure.ABSOLUTE, VariantKind.approximation(), 2)


class TestFixedMinB:
    def test_upper_forces_half_tail_power(self):
        assert abs_spec(VariantKind.upper_bound(), 2).fixed_min_b == 0.5
        qam = SolveSpec(QAM, ErrorMeasure.ABSOLUTE, VariantKind.upper_bound(), 2)
        assert qam.fixed_min_b == 0.5  # tail ~ 2Q, not Q**2
        cubed = SolveSpec(
            TargetPoly.power(3), ErrorMeasure.ABSOLUTE, VariantKind.upper_bound(), 2
        )
        assert cubed.fixed_min_b == 1.5

    def test_explicit_value_must_match(self):
        ok = abs_spec(VariantKind.upper_bound(), 2, fixed_min_b=0.5)
        assert ok.fixed_min_b == 0.5
        with pytest.raises(ValidationError):
            abs_spec(VariantKind.upper_bound(), 2, fixed_min_b=1.0)

    def test_only_upper_bounds_accept_it(self):
        with pytest.raises(ValidationError):
            abs_spec(VariantKind.approximation(), 2, fixed_min_b=0.5)
        with pytest.raises(ValidationError):
            abs_spec(VariantKind.lower_bound(), 2, fixed_min_b=0.5)

    def test_upper_needs_vanishing_tail(self):
        t = TargetPoly((1.0, 1.0))
        with pytest.raises(ValidationError):
            SolveSpec(t, ErrorMeasure.ABSOLUTE, VariantKind.upper_bound(), 2)


class TestWeights:
    def test_default_uniform(self):
        assert abs_spec(VariantKind.approximation(), 2).weights == (1.0,) * 5

    def test_wrong_length(self):
        with pytest.raises(ValidationError):
            abs_spec(VariantKind.approximation(), 2, weights=(1.0, 1.0))

    @pytest.mark.parametrize("w", [0.0, -0.5, 1.5])
    def test_out_of_range_weight(self, w):
        with pytest.raises(ValidationError):
            abs_spec(VariantKind.approximation(), 2, weights=(1.0, 1.0, w, 1.0, 1.0))

    def test_some_weight_must_anchor_the_level(self):
        with pytest.raises(ValidationError):
            abs_spec(VariantKind.approximation(), 2, weights=(0.5,) * 5)


class TestMinimaxSolution:
    SPEC = SolveSpec(IDENT, ErrorMeasure.ABSOLUTE, VariantKind.approximation(), 2)

    def make(self, **kw) -> MinimaxSolution:
        args = dict(
            expsum=GOOD_SUM,
            e_max=9.5e-3,
            extrema=(0.5, 1.2, 2.0, 3.1),
            spec=self.SPEC,
            iterations=7,
            residual_norm=1e-13,
        )
        args.update(kw)
        return MinimaxSolution(**args)

    def test_roundtrip(self):
        sol = self.make()
        assert sol.extrema == (0.5, 1.2, 2.0, 3.1)
        assert sol.iterations == 7

    def test_extrema_count_enforced(self):
        with pytest.raises(ValidationError):
            self.make(extrema=(0.5, 1.2, 2.0))

    @pytest.mark.parametrize(
        "xs", [(0.5, 1.2, 1.2, 3.1), (0.5, 2.0, 1.2, 3.1), (-0.1, 1.2, 2.0, 3.1)]
    )
    def test_extrema_must_increase(self, xs):
        with pytest.raises(ValidationError):
            self.make(extrema=xs)

    @pytest.mark.parametrize("bad", [0.0, -1e-3, float("nan")])
    def test_e_max_positive(self, bad):
        with pytest.raises(ValidationError):
            self.make(e_max=bad)

    @pytest.mark.parametrize("bad", [1e-11, float("nan")])
    def test_residual_contract(self, bad):
        with pytest.raises(ValidationError):
            self.make(residual_norm=bad)

    def test_extrema_below_x_end(self):
        spec = rel_spec(VariantKind.approximation(), 2)  # K = 3, x_end = 6
        MinimaxSolution(GOOD_SUM, 1e-3, (0.5, 1.0, 5.9), spec, 3, 0.0)
        with pytest.raises(ValidationError):
            MinimaxSolution(GOOD_SUM, 1e-3, (0.5, 1.0, 6.0), spec, 3, 0.0)
