import math

import numpy as np
import pytest

from matrix_core import GeomeanPencil, HermitianPSD, frobenius_norm, log_mean_map
from oracle import (KahanSummation, SumSpec, brute_sum, composite_simpson, gauss_legendre, quad_geomean_integral,
                    quad_matrix_integral, quad_scalar_integral)
from scalar_means import (alpha_m, beta_m, delta_m, fit_order, gamma_m, induction_gap, lemma3_gap, lemma5_gap,
                          log_mean, power_scale)
from verify import InstanceSpec, gen_instance


class TestRules:
    def test_gauss_legendre_on_unit_interval(self):
        rule = gauss_legendre(8)
        assert rule.weights.sum() == pytest.approx(1.0, rel=1e-14)
        assert np.all((rule.nodes > 0) & (rule.nodes < 1))
        # exact for polynomials of degree <= 15
        assert rule.integrate(rule.nodes ** 15) == pytest.approx(1 / 16, rel=1e-13)

    def test_simpson_exact_for_cubics(self):
        rule = composite_simpson(3)
        assert rule.points == 7
        assert rule.integrate(rule.nodes ** 3) == pytest.approx(0.25, rel=1e-14)

    def test_default_rule_exact_to_degree_127(self):
        rule = gauss_legendre()
        assert rule.points == 64
        for degree in range(128):
            assert rule.integrate(rule.nodes ** degree) == pytest.approx(1 / (degree + 1), rel=1e-12), degree

    def test_simpson_error_is_fourth_order(self):
        panels = [4, 8, 16, 32]
        errors = [abs(quad_scalar_integral(4.0, composite_simpson(n)) - log_mean((4, 1))) for n in panels]
        assert fit_order(panels, errors) == pytest.approx(4.0, abs=0.1)

    def test_rules_are_cached_and_frozen(self):
        assert gauss_legendre(16) is gauss_legendre(16)
        with pytest.raises(ValueError):
            gauss_legendre(16).nodes[0] = 0.5

    def test_invalid_sizes(self):
        with pytest.raises(ValueError):
            gauss_legendre(1)
        with pytest.raises(ValueError):
            composite_simpson(0)


class TestScalarQuadrature:
    @pytest.mark.parametrize("t", [1e-3, 0.25, 1.0, 4.0, 1e3])
    def test_matches_log_mean(self, t):
        assert quad_scalar_integral(t) == pytest.approx(log_mean((t, 1.0)), rel=1e-12)

    def test_simpson_converges(self):
        assert quad_scalar_integral(4.0, composite_simpson(64)) == pytest.approx(log_mean((4, 1)), rel=1e-8)

    def test_rejects_non_positive(self):
        with pytest.raises(ValueError):
            quad_scalar_integral(0.0)


class TestMatrixQuadrature:
    def test_log_mean_map_agrees(self):
        rng = np.random.default_rng(3)
        for seed in rng.integers(0, 2 ** 32, 25):
            tr = gen_instance(InstanceSpec(seed=int(seed)))
            closed = log_mean_map(tr.A, tr.B, tr.X)
            quad = quad_matrix_integral(tr.A, tr.B, tr.X)
            scale = frobenius_norm(tr.X) * max(1.0, frobenius_norm(tr.A), frobenius_norm(tr.B))
            assert frobenius_norm(closed - quad) <= 1e-8 * scale

    def test_singular_instances_agree(self):
        tr = gen_instance(InstanceSpec(seed=9, dim=5, require_pd=False))
        closed = log_mean_map(tr.A, tr.B, tr.X)
        quad = quad_matrix_integral(tr.A, tr.B, tr.X)
        scale = frobenius_norm(tr.X) * max(1.0, frobenius_norm(tr.A), frobenius_norm(tr.B))
        assert frobenius_norm(closed - quad) <= 1e-8 * scale

    def test_geomean_integral_agrees(self):
        for seed in range(20):
            tr = gen_instance(InstanceSpec(seed=seed, eig_range=(1e-2, 1e2)))
            closed = GeomeanPencil.of(tr.A, tr.B).integral()
            quad = quad_geomean_integral(tr.A, tr.B)
            assert frobenius_norm(closed - quad) <= 1e-8 * max(1.0, frobenius_norm(closed))

    def test_commuting_geomean_integral(self):
        A, B = HermitianPSD.diagonal([4.0, 1.0]), HermitianPSD.diagonal([1.0, 1.0])
        quad = quad_geomean_integral(A, B)
        np.testing.assert_allclose(np.diag(quad).real, [log_mean((4, 1)), 1.0], rtol=1e-12)


def _tol(x, max_exponent, m):
    return 1e-12 * power_scale(x, max_exponent, 2 * m)


class TestBruteSums:
    def test_kahan_recovers_cancelled_terms(self):
        acc = KahanSummation()
        for value in (1.0, 1e100, 1.0, -1e100):
            acc.add(value)
        assert acc.value == 2.0

    @pytest.mark.parametrize("t", [1e-3, 0.3, 2.0, 1e3])
    @pytest.mark.parametrize("m", [1, 3, 16, 64])
    def test_families_match_closed_forms(self, t, m):
        assert brute_sum("alpha", t, m) == pytest.approx(alpha_m(t, m, "closed"), rel=1e-12)
        assert brute_sum(SumSpec.BETA, t, m) == pytest.approx(beta_m(t, m, "closed"), rel=1e-12)
        assert brute_sum("gamma", t, m) == pytest.approx(gamma_m(t, m), rel=1e-14)
        assert brute_sum("delta", t, m) == pytest.approx(delta_m(t, m), rel=1e-14)

    @pytest.mark.parametrize("x", [0.5, 1.0, 1.5])
    def test_integer_gaps(self, x):
        for m in range(2, 7):
            assert brute_sum("lemma3", x, m) == pytest.approx(lemma3_gap(x, m), abs=_tol(x, 2 * m * m + m, m))
            assert brute_sum("lemma5", x, m) == pytest.approx(lemma5_gap(x, m), abs=_tol(x, m * m, m))
            assert brute_sum("induction", x, m) == pytest.approx(induction_gap(x, m), abs=_tol(x, m, m))

    def test_overflowing_terms_give_nan(self):
        assert math.isnan(brute_sum("lemma3", 10.0, 64))
        assert math.isnan(lemma3_gap(10.0, 64))
        assert math.isnan(brute_sum("lemma5", 10.0, 64))
        assert math.isnan(brute_sum(SumSpec.INDUCTION, 1e10, 64))
        assert math.isfinite(brute_sum("lemma3", 1.01, 64))

    def test_order_range(self):
        with pytest.raises(ValueError):
            brute_sum("alpha", 2.0, 65)
        with pytest.raises(ValueError):
            brute_sum("lemma5", 2.0, 1)
        with pytest.raises(ValueError):
            brute_sum("epsilon", 2.0, 3)

    def test_beta_at_one(self):
        assert math.isclose(brute_sum("beta", 1.0, 5), 1.0, rel_tol=1e-15)
