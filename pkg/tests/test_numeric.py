import math
import random
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from replicheck.numeric import (
    DomainError,
    binomial_lower_tail,
    binomial_upper_tail,
    confidence_level_for_multiplier,
    erf,
    log_binomial_coefficient,
    log_binomial_pmf,
    multiplier_for_confidence_level,
)

# exact big-integer sum of C(1560, j) / 2**1560 over j >= 829
TAIL_1560_829 = 0.007013837863275993930774329725146047745207
# ln C(1560, 780) from the exact integer
LNC_1560_780 = 1077.407429514348882741387443688153930273


class TestErf:
    def test_zero(self):
        assert erf(0.0) == 0.0

    def test_95_percent_multiplier(self):
        assert erf(1.96 / math.sqrt(2)) == pytest.approx(0.95, abs=1e-3)

    def test_2_5_multiplier_is_not_99_percent(self):
        assert erf(2.5 / math.sqrt(2)) == pytest.approx(0.98758, abs=1e-4)
        assert abs(erf(2.5 / math.sqrt(2)) - 0.99) > 1e-3

    @pytest.mark.parametrize("x", [-40.0, -6.0, -2.3, -0.5, -1e-9, 1e-12, 0.3, 0.84375, 1.25, 2.857, 4.0, 6.0, 27.0])
    def test_against_mpmath(self, x):
        assert abs(erf(x) - float(oracles.erf(x))) <= 1e-7

    def test_dense_grid_against_mpmath(self):
        xs = [i / 100 for i in range(-700, 701)]
        worst = max(abs(erf(x) - float(oracles.erf(x))) for x in xs)
        assert worst <= 1e-7

    def test_odd(self):
        rng = random.Random(7)
        for _ in range(1000):
            x = rng.uniform(-6, 6)
            assert abs(erf(-x) + erf(x)) <= 1e-12

    def test_monotone(self):
        values = [erf(i / 250) for i in range(-2000, 2001)]
        assert all(a <= b for a, b in zip(values, values[1:]))

    @pytest.mark.parametrize("x", [math.inf, -math.inf, math.nan])
    def test_non_finite(self, x):
        with pytest.raises(DomainError):
            erf(x)


class TestConfidenceLevel:
    @pytest.mark.parametrize(
        "n, level, tol",
        [(0.0, 0.0, 0.0), (1.96, 0.95, 1e-3), (2.5, 0.98758, 1e-4)],
    )
    def test_forward(self, n, level, tol):
        assert confidence_level_for_multiplier(n) == pytest.approx(level, abs=tol)

    def test_negative_multiplier(self):
        with pytest.raises(DomainError):
            confidence_level_for_multiplier(-0.1)

    @pytest.mark.parametrize("level, n", [(0.0, 0.0), (0.95, 1.959964), (0.99, 2.575829)])
    def test_inverse(self, level, n):
        assert multiplier_for_confidence_level(level) == pytest.approx(n, abs=1e-5)

    @pytest.mark.parametrize("level", [0.5, 0.9, 0.95, 0.99, 0.999])
    def test_inverse_against_high_precision_bisection(self, level):
        expected = float(oracles.multiplier_by_bisection(level))
        assert multiplier_for_confidence_level(level) == pytest.approx(expected, abs=1e-9)

    def test_round_trip_100_levels(self):
        for i in range(100):
            level = 0.999 * i / 99
            n = multiplier_for_confidence_level(level)
            assert abs(confidence_level_for_multiplier(n) - level) <= 1e-9

    def test_extreme_level(self):
        n = multiplier_for_confidence_level(1 - 1e-15)
        assert 7.5 < n < 9

    @pytest.mark.parametrize("level", [1.0, 1.5, -0.01, math.nan])
    def test_inverse_domain(self, level):
        with pytest.raises(DomainError):
            multiplier_for_confidence_level(level)


class TestLogBinomialCoefficient:
    def test_k_zero(self):
        assert log_binomial_coefficient(5, 0) == 0.0

    def test_small(self):
        assert log_binomial_coefficient(4, 2) == pytest.approx(math.log(6), rel=1e-15)

    def test_1560_780(self):
        assert log_binomial_coefficient(1560, 780) == pytest.approx(LNC_1560_780, rel=1e-12)

    @pytest.mark.parametrize("n, k", [(10**6, 1), (10**6, 3), (10**6, 1234), (10**6 - 1, 500_000), (200_001, 77_777)])
    def test_large_n_against_loggamma(self, n, k):
        import mpmath

        with mpmath.workdps(40):
            expected = float(mpmath.loggamma(n + 1) - mpmath.loggamma(k + 1) - mpmath.loggamma(n - k + 1))
        assert log_binomial_coefficient(n, k) == pytest.approx(expected, rel=1e-12)

    def test_symmetric(self):
        assert log_binomial_coefficient(97, 13) == log_binomial_coefficient(97, 84)

    def test_k_above_n(self):
        with pytest.raises(DomainError):
            log_binomial_coefficient(3, 4)


class TestBinomialTails:
    def test_two_coins(self):
        assert binomial_upper_tail(2, 1, 0.5) == pytest.approx(0.75, abs=1e-15)

    @pytest.mark.parametrize("n, p", [(0, 0.3), (7, 0.0), (30, 0.5), (1560, 0.9)])
    def test_k_zero_is_certain(self, n, p):
        assert binomial_upper_tail(n, 0, p) == 1.0

    def test_ten_trials(self):
        assert binomial_upper_tail(10, 8, 0.5) == pytest.approx(56 / 1024, abs=1e-15)

    def test_1560_829_regression(self):
        assert binomial_upper_tail(1560, 829, 0.5) == pytest.approx(TAIL_1560_829, abs=1e-12)
        assert binomial_upper_tail(1560, 829, 0.5) == pytest.approx(TAIL_1560_829, rel=1e-11)

    def test_degenerate_p(self):
        assert binomial_upper_tail(5, 3, 0.0) == 0.0
        assert binomial_upper_tail(5, 5, 1.0) == 1.0
        assert binomial_lower_tail(5, 0, 0.0) == 1.0
        assert binomial_lower_tail(5, 4, 1.0) == 0.0

    def test_far_tail_keeps_relative_accuracy(self):
        assert binomial_upper_tail(1560, 1560, 0.5) == pytest.approx(2.0**-1560, rel=1e-12)
        assert binomial_upper_tail(1560, 1200, 0.5) == pytest.approx(
            float(oracles.exact_upper_tail(1560, 1200)), rel=1e-11
        )

    @pytest.mark.parametrize("n", range(0, 21))
    def test_enumeration_half(self, n):
        for k in range(n + 1):
            expected = float(oracles.enumerate_upper_tail(n, k)) if n <= 14 else float(oracles.exact_upper_tail(n, k))
            assert abs(binomial_upper_tail(n, k, 0.5) - expected) <= 1e-12

    @given(
        n=st.integers(min_value=1, max_value=20),
        data=st.data(),
        p=st.floats(min_value=0.0, max_value=1.0),
    )
    @settings(max_examples=300, deadline=None)
    def test_tails_partition(self, n, data, p):
        k = data.draw(st.integers(min_value=1, max_value=n))
        total = binomial_upper_tail(n, k, p) + binomial_lower_tail(n, k - 1, p)
        assert abs(total - 1.0) <= 1e-12

    @given(
        n=st.integers(min_value=1, max_value=60),
        data=st.data(),
        p=st.fractions(min_value=0, max_value=1, max_denominator=1000),
    )
    @settings(max_examples=200, deadline=None)
    def test_against_exact_rational(self, n, data, p):
        k = data.draw(st.integers(min_value=0, max_value=n))
        assert abs(binomial_upper_tail(n, k, float(p)) - float(oracles.exact_upper_tail(n, k, p))) <= 1e-12
        assert abs(binomial_lower_tail(n, k, float(p)) - float(oracles.exact_lower_tail(n, k, p))) <= 1e-12

    def test_invalid_k(self):
        with pytest.raises(DomainError):
            binomial_upper_tail(5, 6, 0.5)
        with pytest.raises(DomainError):
            binomial_upper_tail(5, -1, 0.5)

    def test_pmf_matches_integer(self):
        assert math.exp(log_binomial_pmf(10, 3, 0.5)) == pytest.approx(comb(10, 3) / 1024, rel=1e-14)
