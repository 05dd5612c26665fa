import math
from fractions import Fraction

import numpy as np
import pytest

from cmcradius import bounds
from cmcradius.errors import (
    DimensionError,
    EmptyIntervalError,
    HypothesisViolation,
    NoApplicableBound,
    PreconditionViolation,
)


class TestDeltaThreshold:
    @pytest.mark.parametrize("n,expected", [
        (2, Fraction(27, 32)),
        (3, Fraction(7, 12)),
        (4, Fraction(19, 64)),
    ])
    def test_exact_rationals(self, n, expected):
        assert bounds.delta_threshold(n) == expected

    @pytest.mark.parametrize("n", [1, 5, 0, -2])
    def test_dimension_out_of_range(self, n):
        with pytest.raises(DimensionError):
            bounds.delta_threshold(n)


class TestKInterval:
    def test_n3_delta0(self):
        iv = bounds.k_interval(3, 0)
        assert (iv.lo, iv.hi) == (Fraction(5, 6), Fraction(2))

    def test_n2_delta0(self):
        iv = bounds.k_interval(2, 0)
        assert (iv.lo, iv.hi) == (Fraction(5, 8), Fraction(4))

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_empty_exactly_at_threshold(self, n):
        thr = bounds.delta_threshold(n)
        with pytest.raises(EmptyIntervalError):
            bounds.k_interval(n, thr)
        # Just below the threshold the interval is nonempty.
        iv = bounds.k_interval(n, thr - Fraction(1, 10**9))
        assert iv.lo < iv.hi

    def test_delta_out_of_range(self):
        with pytest.raises(PreconditionViolation):
            bounds.k_interval(2, 1.5)


class TestCoefficients:
    def test_A_scalar_choice_n2(self):
        # k = 1/(1-delta) reproduces 4(1-delta)/(3-4delta)
        for delta in (0.0, 0.25, 0.5, 0.7):
            k = 1.0 / (1.0 - delta)
            expected = 4.0 * (1.0 - delta) / (3.0 - 4.0 * delta)
            assert bounds.coeff_A(2, k) == pytest.approx(expected, rel=1e-14)

    def test_A_direct_values(self):
        assert bounds.coeff_A(2, 7 / 4) == pytest.approx(16 / 9, rel=1e-14)
        assert bounds.coeff_A(3, 1.0) == pytest.approx(2.0, rel=1e-14)

    def test_A_domain_error(self):
        with pytest.raises(HypothesisViolation):
            bounds.coeff_A(3, 2.0)

    def test_B_negative_ambient_n2(self):
        # B = (2k+1)(H^2 - 1) for n=2, delta=0, K=-1.
        for k, H in [(1.0, 2.0), (1.5, 3.0), (0.7, 2.5)]:
            expected = (2 * k + 1) * (H * H - 1.0)
            assert bounds.coeff_B(2, k, 0.0, H, -1.0) == pytest.approx(expected, rel=1e-14)
        assert bounds.coeff_B(2, 1.0, 0.0, 2.0, -1.0) == pytest.approx(9.0, rel=1e-14)

    def test_B_scalar_pipeline_coefficient(self):
        # n=2, k=1/(1-delta), K=0: coefficient 2k(1-delta)+1 = 3.
        for delta in (0.0, 0.3, 0.6):
            k = 1.0 / (1.0 - delta)
            for H in (0.5, 1.0, 2.0):
                assert bounds.coeff_B(2, k, delta, H, 0.0) == pytest.approx(3 * H * H, rel=1e-14)

    def test_B_positive_curvature_term_dropped(self):
        assert bounds.coeff_B(3, 1.0, 0.0, 1.0, 5.0) == bounds.coeff_B(3, 1.0, 0.0, 1.0, 0.0)

    def test_B_lower_endpoint_n4(self):
        k = 15 / 16
        assert bounds.coeff_B(4, k, 0.0, 1.0, 0.0) == pytest.approx(4 * k - 1, rel=1e-12)


class TestMeanCurvatureThreshold:
    @pytest.mark.parametrize("K,expected", [(0.0, 0.0), (-1.0, 2.0), (5.0, 0.0), (-4.0, 4.0)])
    def test_values(self, K, expected):
        assert bounds.mean_curvature_threshold(K) == expected


class TestQuotientBound:
    @pytest.mark.parametrize("n,k,delta,expected", [
        (2, 1.0, 0.0, 1.0),
        (3, 1.0, 0.0, 5 / 4),
        (4, 1.0, 0.0, 7 / 3),
    ])
    def test_direct_values(self, n, k, delta, expected):
        assert bounds.check_quotient_bound(n, k, delta) == pytest.approx(expected, rel=1e-14)

    def test_below_four_on_grid(self):
        for n in (2, 3, 4):
            thr = float(bounds.delta_threshold(n))
            for delta in np.linspace(0.0, 0.95 * thr, 12):
                iv = bounds.k_interval(n, float(delta))
                lo, hi = iv.interior(1e-6)
                for k in np.linspace(lo, hi, 25):
                    assert bounds.check_quotient_bound(n, float(k), float(delta)) < 4.0

    def test_domain_error(self):
        with pytest.raises(PreconditionViolation):
            bounds.check_quotient_bound(4, 0.1, 0.0)


class TestRadiusBoundFixedK:
    def test_reference_case(self):
        inp = bounds.BoundInput(2, 0.0, 2.5, -1.0)
        res = bounds.radius_bound_fixed_k(inp, 7 / 4)
        expected = (4 * math.sqrt(2) / 9) * math.pi / math.sqrt(5.25)
        assert res.c == pytest.approx(expected, rel=1e-12)
        assert res.c == pytest.approx(0.8618, abs=2e-4)
        assert all(res.hypotheses_met.values())

    def test_flat_unit_case(self):
        res = bounds.radius_bound_fixed_k(bounds.BoundInput(2, 0.0, 1.0, 0.0), 1.0)
        assert res.c == pytest.approx(2 * math.pi / 3, rel=1e-12)

    def test_boundary_case_flags_both(self):
        inp = bounds.BoundInput(2, 0.0, 2.0, -1.0)
        with pytest.raises(HypothesisViolation) as exc:
            bounds.radius_bound_fixed_k(inp, 5 / 8)
        msg = str(exc.value)
        assert "k=" in msg and "threshold" in msg

    def test_b_nonpositive(self):
        # H below threshold makes B <= 0 for small k.
        with pytest.raises(HypothesisViolation):
            bounds.radius_bound_fixed_k(bounds.BoundInput(2, 0.0, 0.5, -1.0), 1.0)


class TestRadiusBound:
    def test_optimum_matches_parabola_vertex(self):
        # Oracle: maximize (4-k)(2k+1), a downward parabola with vertex 7/4.
        inp = bounds.BoundInput(2, 0.0, 2.5, -1.0)
        res = bounds.radius_bound(inp)
        assert res.k_star == pytest.approx(7 / 4, abs=1e-6)
        assert res.c == pytest.approx((4 * math.sqrt(2) / 9) * math.pi / math.sqrt(5.25), rel=1e-9)

    def test_grid_scan_oracle(self):
        # Dense grid scan over k must not beat the optimizer.
        inp = bounds.BoundInput(2, 0.0, 2.5, -1.0)
        res = bounds.radius_bound(inp)
        iv = bounds.k_interval(2, 0.0)
        lo, hi = iv.interior(1e-6)
        best_grid = min(
            bounds.radius_bound_fixed_k(inp, float(k)).c for k in np.arange(lo, hi, 1e-4)
        )
        assert res.c <= best_grid * (1 + 1e-10)

    def test_h_scaling_ratio(self):
        c3 = bounds.radius_bound(bounds.BoundInput(2, 0.0, 3.0, -1.0)).c
        c5 = bounds.radius_bound(bounds.BoundInput(2, 0.0, 5.0, -1.0)).c
        assert c3 / c5 == pytest.approx(math.sqrt(3), rel=1e-10)

    def test_threshold_delta_raises(self):
        with pytest.raises((HypothesisViolation, EmptyIntervalError)):
            bounds.radius_bound(bounds.BoundInput(3, 7 / 12, 3.0, -1.0))

    def test_optimizer_dominance(self):
        inp = bounds.BoundInput(3, 0.2, 3.0, -1.0)
        res = bounds.radius_bound(inp)
        iv = bounds.k_interval(3, 0.2)
        lo, hi = iv.interior(1e-6)
        for k in np.linspace(lo, hi, 50):
            assert res.c <= bounds.radius_bound_fixed_k(inp, float(k)).c * (1 + 1e-9)

    def test_monotone_in_delta(self):
        prev = -math.inf
        for delta in np.linspace(0.0, 0.55, 10):
            c = bounds.radius_bound(bounds.BoundInput(3, float(delta), 3.0, -1.0)).c
            assert c >= prev - 1e-12
            prev = c


class TestRadiusBoundScalar:
    def test_reference_value(self):
        res = bounds.radius_bound_scalar(0.0, 2.5, -6.0)
        assert res.c == pytest.approx(2 * math.pi / (3 * math.sqrt(2.5**2 - 2)), rel=1e-12)
        assert res.c == pytest.approx(1.0159, abs=2e-4)

    def test_simple_values(self):
        assert bounds.radius_bound_scalar(0.0, 1.0, 0.0).c == pytest.approx(2 * math.pi / 3, rel=1e-12)
        assert bounds.radius_bound_scalar(0.5, 1.0, 0.0).c == pytest.approx(
            2 * math.pi / math.sqrt(6), rel=1e-12)

    def test_hypothesis_violations(self):
        with pytest.raises(HypothesisViolation):
            bounds.radius_bound_scalar(0.8, 1.0, 0.0)
        with pytest.raises(HypothesisViolation):
            bounds.radius_bound_scalar(0.0, 1.0, -3.0)

    def test_matches_fixed_k_route(self):
        # pi*sqrt(A/B) with A = 4(1-d)/(3-4d), B = 3H^2+S equals the closed form.
        rng = np.random.default_rng(7)
        for _ in range(100):
            delta = rng.uniform(0.0, 0.74)
            H = rng.uniform(0.2, 5.0)
            S = rng.uniform(-3 * H * H + 0.1, 10.0)
            res = bounds.radius_bound_scalar(delta, H, S)
            A = 4 * (1 - delta) / (3 - 4 * delta)
            B = 3 * H * H + S
            assert res.c == pytest.approx(math.pi * math.sqrt(A / B), rel=1e-12)


class TestBestBound:
    def test_sectional_wins(self):
        res = bounds.best_bound(bounds.BoundInput(2, 0.0, 2.5, -1.0, -6.0))
        assert res.source == "sectional"
        assert res.c == pytest.approx(0.8618, abs=2e-4)

    def test_only_scalar_applies(self):
        res = bounds.best_bound(bounds.BoundInput(2, 0.0, 1.6, -1.0, -6.0))
        assert res.source == "scalar"
        assert res.B == pytest.approx(3 * 1.6**2 - 6, rel=1e-12)

    def test_no_applicable(self):
        with pytest.raises(NoApplicableBound):
            bounds.best_bound(bounds.BoundInput(3, 0.0, 1.0, -1.0))
