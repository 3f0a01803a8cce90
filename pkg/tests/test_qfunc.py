"""Tests for the Q-function kernel and its cross-validation oracle."""

from __future__ import annotations

import math

import numpy as np
import pytest

from qexpsum import DomainError, ValidationError
from qexpsum.qfunc import REFERENCE_Q_TABLE, q, q_craig_oracle, q_prime

# Left-tail values 1 - Q(x) computed offline with a 50-digit erfc oracle.
PHI_TABLE = [
    (0.3, 0.6179114221889527),
    (0.9, 0.8159398746532405),
    (1.7, 0.955434537241457),
    (2.6, 0.9953388119762813),
    (3.3, 0.9995165758576162),
    (5.0, 0.9999997133484281),
    (9.0, 1.0),
]


class TestQ:
    def test_reference_table(self):
        for x, ref in REFERENCE_Q_TABLE:
            rel = abs(q(x) - ref) / ref
            assert rel <= 1e-14, f"q({x}): relative error {rel:.3e}"

    def test_half_at_zero(self):
        assert q(0.0) == 0.5

    def test_frozen_anchors(self):
        assert abs(q(1.0) - 0.15865525393145705) <= 1e-15
        assert abs(q(6.0) / 9.86587645037698e-10 - 1.0) <= 1e-14

    def test_array_matches_scalar(self):
        xs = np.linspace(0.0, 37.0, 400)
        arr = q(xs)
        assert isinstance(arr, np.ndarray) and arr.shape == xs.shape
        for i, x in enumerate(xs):
            assert arr[i] == q(float(x))

    def test_shape_preserved(self):
        grid = np.array([[0.0, 1.0], [2.0, 3.0]])
        out = q(grid)
        assert out.shape == (2, 2)
        assert out[0, 0] == 0.5

    def test_strictly_decreasing(self):
        xs = np.linspace(0.0, 37.5, 2000)
        vals = q(xs)
        assert np.all(np.diff(vals) < 0.0)

    def test_underflow_graceful(self):
        assert q(37.5) > 0.0
        deep = q(np.array([38.5, 39.0, 40.0]))
        assert np.all(deep >= 0.0)
        assert np.all(np.diff(q(np.linspace(37.5, 40.0, 50))) <= 0.0)

    def test_reflection_matches_left_tail(self):
        for x, phi in PHI_TABLE:
            assert abs((1.0 - q(x)) - phi) <= 1e-14 * phi

    def test_rejects_negative_and_nonfinite(self):
        with pytest.raises(DomainError):
            q(-0.5)
        with pytest.raises(DomainError):
            q(float("nan"))
        with pytest.raises(DomainError):
            q(float("inf"))
        with pytest.raises(DomainError):
            q(np.array([0.5, -1.0]))


class TestQPrime:
    def test_known_values(self):
        assert q_prime(0.0) == -0.3989422804014327
        assert abs(q_prime(1.0) - (-0.24197072451914337)) <= 1e-16

    def test_never_positive(self):
        xs = np.linspace(0.0, 40.0, 500)
        assert np.all(q_prime(xs) <= 0.0)

    def test_matches_central_difference_spot(self):
        x, h = 0.7, 1e-5
        fd = (q(x + h) - q(x - h)) / (2.0 * h)
        assert abs(fd / q_prime(x) - 1.0) <= 1e-6

    def test_matches_central_difference_grid(self):
        h = 1e-5
        for x in np.linspace(0.1, 6.0, 60):
            fd = (q(x + h) - q(x - h)) / (2.0 * h)
            assert abs(fd / q_prime(float(x)) - 1.0) <= 1e-6

    def test_rejects_nonfinite(self):
        with pytest.raises(DomainError):
            q_prime(float("nan"))


class TestCraigOracle:
    def test_exact_at_zero(self):
        for nodes in (4, 8, 64):
            assert q_craig_oracle(0.0, nodes) == 0.5

    def test_cross_oracle_at_one(self):
        assert abs(q_craig_oracle(1.0, 64) / q(1.0) - 1.0) <= 1e-12

    def test_agrees_on_grid(self):
        for x in np.linspace(0.0, 8.0, 1000):
            x = float(x)
            if x == 0.0:
                continue
            rel = abs(q_craig_oracle(x, 64) / q(x) - 1.0)
            assert rel <= 1e-12, f"craig({x}): relative error {rel:.3e}"

    def test_node_convergence(self):
        ref = q_craig_oracle(3.0, 64)
        assert q_craig_oracle(3.0, 8) != ref
        diffs = [abs(q_craig_oracle(3.0, n) - ref) for n in (8, 16, 32)]
        assert diffs[0] > diffs[1] > diffs[2]

    def test_validates_inputs(self):
        with pytest.raises(ValidationError):
            q_craig_oracle(1.0, 3)
        with pytest.raises(ValidationError):
            q_craig_oracle(1.0, 16.0)  # type: ignore[arg-type]
        with pytest.raises(DomainError):
            q_craig_oracle(-1.0, 64)
        with pytest.raises(DomainError):
            q_craig_oracle(math.inf, 64)
