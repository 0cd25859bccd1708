import math

import numpy as np
import pytest

from scalar_means import (BoundOrder, PositivePair, alpha_m, arith_mean, beta_m, convergence_profile, delta_m,
                          fit_order, gamma_m, geo_mean, induction_gap, int_power, lemma2_expr, lemma3_gap,
                          lemma5_gap, lin_upper, log_mean, log_mean_array, lower_sum_pair, mid_sum_pair,
                          polya_upper, power_scale, rational_lower, upper_sum_pair)

L4 = 3.0 / math.log(4.0)


class TestPositivePair:
    def test_converts_to_float(self):
        p = PositivePair(4, 1)
        assert isinstance(p.a, float) and p.ratio == 4.0

    @pytest.mark.parametrize("a,b", [(0.0, 1.0), (-1.0, 2.0), (1.0, math.inf), (math.nan, 1.0)])
    def test_rejects_non_positive(self, a, b):
        with pytest.raises(ValueError):
            PositivePair(a, b)

    def test_bound_order(self):
        assert BoundOrder(3).require(2) == 3
        with pytest.raises(ValueError):
            BoundOrder(0)
        with pytest.raises(ValueError):
            BoundOrder(True)
        with pytest.raises(ValueError, match=">= 2"):
            BoundOrder(1).require(2)


class TestLogMean:
    def test_values_at_four(self):
        assert log_mean((4, 1)) == pytest.approx(2.164043, abs=1e-6)
        assert log_mean((4, 1)) == pytest.approx(L4, rel=1e-15)

    def test_diagonal(self):
        assert log_mean((2.5, 2.5)) == 2.5

    def test_symmetric_and_homogeneous(self):
        assert log_mean((3.0, 7.0)) == log_mean((7.0, 3.0))
        assert log_mean((8.0, 2.0)) == pytest.approx(2 * L4, rel=1e-15)

    def test_near_diagonal_is_continuous(self):
        a = 1.0 + 1e-9
        assert log_mean((a, 1.0)) == pytest.approx((a + 1.0) / 2.0, rel=1e-15)
        assert log_mean((1.0 + 1e-7, 1.0)) == pytest.approx(1.0 + 5e-8, rel=1e-14)

    def test_array_matches_scalar(self):
        a = np.array([4.0, 1.0, 0.5, 3.0])
        b = np.array([1.0, 1.0, 2.0, 3.0 + 1e-12])
        out = log_mean_array(a, b)
        for i in range(4):
            assert out[i] == pytest.approx(log_mean((a[i], b[i])), rel=1e-14)

    def test_array_zero_limits(self):
        out = log_mean_array(np.array([0.0, 2.0, 0.0]), np.array([3.0, 0.0, 0.0]))
        assert out.tolist() == [0.0, 0.0, 0.0]

    def test_array_broadcasts(self):
        out = log_mean_array(np.array([1.0, 4.0])[:, None], np.array([1.0, 4.0])[None, :])
        assert out.shape == (2, 2)
        assert out[0, 1] == out[1, 0] == pytest.approx(L4, rel=1e-14)

    @pytest.mark.parametrize("a,b", [(1e200, 1e-200), (1e-310, 1.0), (1e300, 1e-10)])
    def test_ratio_beyond_float_range(self, a, b):
        expected = (a - b) / (math.log(a) - math.log(b))
        assert log_mean((a, b)) == pytest.approx(expected, rel=1e-14)
        assert log_mean((b, a)) == log_mean((a, b))
        assert log_mean_array([a], [b])[0] == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("a,b", [(1e200, 1e-200), (1e-310, 1.0), (1e300, 1e-10)])
def test_bounds_stay_ordered_at_extreme_ratios(a, b):
    p = (a, b)
    values = [geo_mean(p), rational_lower(p), log_mean(p), lin_upper(p), polya_upper(p), arith_mean(p)]
    assert all(math.isfinite(v) for v in values)
    assert values == sorted(values)
    lower = [geo_mean(p), mid_sum_pair(p, 3), lower_sum_pair(p, 3), log_mean(p)]
    assert all(math.isfinite(v) for v in lower)
    assert lower == sorted(lower)
    assert log_mean(p) <= upper_sum_pair(p, 3) <= arith_mean(p)


@pytest.mark.parametrize("scale", [1e-6, 1.0, 1e6])
def test_two_variable_means_are_homogeneous(scale):
    means = [log_mean, geo_mean, arith_mean, lin_upper, polya_upper, rational_lower,
             lambda p: lower_sum_pair(p, 5), lambda p: mid_sum_pair(p, 5), lambda p: upper_sum_pair(p, 5)]
    for a, b in [(4.0, 1.0), (0.3, 2.5), (7.0, 7.0), (1e-3, 1e3)]:
        for mean in means:
            assert mean((scale * a, scale * b)) == pytest.approx(scale * mean((a, b)), rel=1e-13)


class TestBounds:
    def test_values_at_four(self):
        p = (4.0, 1.0)
        assert geo_mean(p) == 2.0
        assert arith_mean(p) == 2.5
        assert lin_upper(p) == pytest.approx(2.165216, abs=1e-6)
        assert polya_upper(p) == pytest.approx(2.166667, abs=1e-6)
        assert rational_lower(p) == pytest.approx(2.159465, abs=1e-6)

    def test_lemma1_margins_at_four(self):
        p = (4.0, 1.0)
        assert lin_upper(p) - log_mean(p) == pytest.approx(1.1736e-3, rel=1e-3)
        assert polya_upper(p) - lin_upper(p) == pytest.approx(1.4505e-3, rel=1e-3)

    def test_all_equal_at_one(self):
        for f in (geo_mean, arith_mean, lin_upper, polya_upper, rational_lower, log_mean):
            assert f((1.0, 1.0)) == pytest.approx(1.0, rel=1e-15)

    def test_rational_lower_is_symmetric(self):
        assert rational_lower((0.3, 5.0)) == pytest.approx(rational_lower((5.0, 0.3)), rel=1e-14)

    def test_ordering_on_seeded_pairs(self):
        rng = np.random.default_rng(7)
        for a, b in np.exp(rng.uniform(np.log(1e-3), np.log(1e3), (200, 2))):
            tol = 1e-12 * max(a, b)
            L = log_mean((a, b))
            assert geo_mean((a, b)) <= rational_lower((a, b)) + tol
            assert rational_lower((a, b)) <= L + tol
            assert L <= lin_upper((a, b)) + tol
            assert lin_upper((a, b)) <= polya_upper((a, b)) + tol


class TestFamilies:
    def test_values_at_four(self):
        assert alpha_m(4, 2) == pytest.approx(2.121320, abs=1e-6)
        assert beta_m(4, 2) == pytest.approx(2.25, rel=1e-15)
        assert gamma_m(4, 2) == pytest.approx(3.0, rel=1e-15)
        assert delta_m(4, 2) == pytest.approx(1.5, rel=1e-15)

    def test_identity_at_one(self):
        for m in (1, 2, 17):
            assert alpha_m(1.0, m) == beta_m(1.0, m) == gamma_m(1.0, m) == delta_m(1.0, m) == 1.0

    def test_closed_form_rejects_one(self):
        with pytest.raises(ValueError):
            alpha_m(1.0, 3, form="closed")

    def test_unknown_form(self):
        with pytest.raises(ValueError, match="form"):
            beta_m(2.0, 3, form="exact")

    @pytest.mark.parametrize("t", [1e-3, 0.25, 0.999, 1.5, 4.0, 1e3])
    @pytest.mark.parametrize("m", [1, 2, 7, 32, 64])
    def test_closed_forms_match_sums(self, t, m):
        assert alpha_m(t, m, "closed") == pytest.approx(alpha_m(t, m, "sum"), rel=1e-12)
        assert beta_m(t, m, "closed") == pytest.approx(beta_m(t, m, "sum"), rel=1e-12)

    def test_brackets_log_mean(self):
        for t in (0.01, 0.5, 2.0, 100.0):
            L = log_mean((t, 1.0))
            for m in (1, 2, 5, 20):
                assert alpha_m(t, m) <= L <= beta_m(t, m)

    def test_monotone_in_order(self):
        for t in (0.1, 4.0):
            alphas = [alpha_m(t, m) for m in range(1, 30)]
            betas = [beta_m(t, m) for m in range(1, 30)]
            assert alphas == sorted(alphas)
            assert betas == sorted(betas, reverse=True)


class TestPairSums:
    def test_values_at_four(self):
        assert mid_sum_pair((4, 1), 2) == pytest.approx(2.053621, abs=1e-6)
        assert lower_sum_pair((4, 1), 2) == pytest.approx(alpha_m(4, 2), rel=1e-15)
        assert upper_sum_pair((4, 1), 2) == pytest.approx(2.5, rel=1e-15)
        assert upper_sum_pair((4, 1), 3) == pytest.approx(7.0 / 3.0, rel=1e-15)

    def test_upper_needs_two(self):
        with pytest.raises(ValueError):
            upper_sum_pair((4, 1), 1)

    def test_mid_sum_at_one_order_is_geo_mean(self):
        assert mid_sum_pair((9.0, 4.0), 1) == pytest.approx(6.0, rel=1e-15)


class TestIntegerExponents:
    def test_int_power(self):
        assert int_power(3.0, 0) == 1.0
        assert int_power(2.0, 10) == 1024.0
        assert int_power(1e10, 40) == math.inf
        with pytest.raises(ValueError):
            int_power(2.0, -1)

    def test_power_scale(self):
        assert power_scale(0.5, 10, 3) == 3.0
        assert power_scale(2.0, 3, 2) == 16.0

    def test_lemma2(self):
        assert lemma2_expr(1.0, 1, 2, 3) == 0.0
        assert lemma2_expr(2.0, 1, 1, 2) == pytest.approx(2.0 * (1 - 2) + 4.0 * (2 - 1))
        with pytest.raises(ValueError, match="w >= u"):
            lemma2_expr(2.0, 3, 1, 2)

    def test_lemma2_nan_on_overflow(self):
        assert math.isnan(lemma2_expr(1e3, 0, 12, 200))

    def test_gaps_nonnegative(self):
        for x in (0.01, 0.5, 0.99, 1.0, 1.01, 2.0, 30.0):
            for m in range(2, 9):
                assert lemma3_gap(x, m) >= -1e-9 * power_scale(x, 2 * m * m + m - 1, 2 * m)
                assert lemma5_gap(x, m) >= -1e-9 * power_scale(x, m * (m - 1), 2 * m)
                assert induction_gap(x, m) >= -1e-9 * power_scale(x, m - 1, 2 * m)

    def test_induction_gap_value(self):
        # m = 3, t = 2: 3 * (4 + 1) / 2 - (1 + 2 + 4)
        assert induction_gap(2.0, 3) == pytest.approx(0.5)


class TestConvergence:
    def test_slopes_near_two(self):
        for t in (0.1, 0.5, 2.0, 4.0, 10.0):
            profile = convergence_profile(t)
            assert 1.8 <= profile.alpha_slope <= 2.2
            assert 1.8 <= profile.beta_slope <= 2.2

    def test_errors_decrease(self):
        profile = convergence_profile(4.0)
        assert list(profile.alpha_errors) == sorted(profile.alpha_errors, reverse=True)
        assert list(profile.beta_errors) == sorted(profile.beta_errors, reverse=True)

    def test_mirror_symmetry(self):
        p4, p_quarter = convergence_profile(4.0), convergence_profile(0.25)
        for e4, eq in zip(p4.beta_errors, p_quarter.beta_errors):
            assert eq == pytest.approx(e4 / 4.0, rel=1e-6)

    def test_rejects_one(self):
        with pytest.raises(ValueError, match="t = 1"):
            convergence_profile(1.0)

    def test_fit_order_exact_power_law(self):
        orders = [4, 8, 16]
        assert fit_order(orders, [1.0 / m ** 2 for m in orders]) == pytest.approx(2.0)
