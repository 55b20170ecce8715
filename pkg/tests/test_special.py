"""Tail-probability routines against independent numerical oracles."""

import math

import numpy as np
import pytest
from scipy import integrate

from affectcausal import chi2_survival, f_survival, regularized_beta, regularized_gamma_q


def chi2_sf_quadrature(x: float, df: int) -> float:
    """Oracle: integrate the chi-square density from x to infinity."""
    a = df / 2.0
    log_norm = a * math.log(2.0) + math.lgamma(a)

    def pdf(t):
        return math.exp((a - 1.0) * math.log(t) - t / 2.0 - log_norm)

    value, _ = integrate.quad(pdf, x, np.inf, epsabs=1e-12, limit=300)
    return value


class TestChi2Survival:
    def test_zero_statistic(self):
        for df in (1, 5, 20):
            assert chi2_survival(0.0, df) == 1.0

    def test_spot_value(self):
        assert abs(chi2_survival(3.841, 1) - 0.05) < 1e-3

    def test_correlated_table_tail(self):
        assert abs(chi2_survival(13.8629, 1) - 1.97e-4) < 5e-6

    @pytest.mark.parametrize("df", [1, 2, 3, 7, 20])
    def test_against_quadrature(self, df):
        for x in (0.5, 2.0, 7.3, 19.0, 42.0):
            assert abs(chi2_survival(x, df) - chi2_sf_quadrature(x, df)) < 1e-8

    def test_monotone_in_x(self):
        for df in (1, 4, 9):
            values = [chi2_survival(x, df) for x in np.linspace(0, 50, 201)]
            assert all(a >= b for a, b in zip(values, values[1:]))

    def test_degenerate_df(self):
        assert chi2_survival(0.0, 0) == 1.0
        assert chi2_survival(2.5, 0) == 0.0

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            chi2_survival(-1.0, 2)


class TestIncompleteGamma:
    def test_complement(self):
        for a in (0.5, 1.0, 3.5, 10.0):
            for x in (0.1, 1.0, 5.0, 20.0):
                q = regularized_gamma_q(a, x)
                assert 0.0 <= q <= 1.0

    def test_known_exponential_case(self):
        # Q(1, x) = exp(-x)
        for x in (0.2, 1.0, 4.0, 11.0):
            assert abs(regularized_gamma_q(1.0, x) - math.exp(-x)) < 1e-12


class TestIncompleteBeta:
    def test_against_scipy(self):
        from scipy import special

        rng = np.random.default_rng(0)
        for _ in range(200):
            a = rng.uniform(0.3, 30)
            b = rng.uniform(0.3, 30)
            x = rng.uniform(0, 1)
            assert abs(regularized_beta(a, b, x) - special.betainc(a, b, x)) < 1e-10

    def test_boundaries(self):
        assert regularized_beta(2.0, 3.0, 0.0) == 0.0
        assert regularized_beta(2.0, 3.0, 1.0) == 1.0


class TestFSurvival:
    def test_against_scipy(self):
        from scipy import stats

        for f in (0.5, 1.0, 2.5, 8.0):
            for d1, d2 in ((1, 10), (3, 40), (6, 4200)):
                assert abs(f_survival(f, d1, d2) - stats.f.sf(f, d1, d2)) < 1e-10

    def test_zero_statistic(self):
        assert f_survival(0.0, 3, 10) == 1.0
