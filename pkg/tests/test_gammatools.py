"""Gamma-ratio machinery against high-precision and brute-force oracles."""

import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from erw import (
    RecursionSpec,
    SingularParameterError,
    gamma_ratio,
    gamma_sum_linear,
    gamma_sum_linear_direct,
    gamma_sum_weighted,
    gamma_sum_weighted_direct,
    iterate_recursion,
    log_gamma_ratio,
    martingale_scale,
    solve_recursion,
    solve_recursion_constant,
)
from erw.gammatools import recip_gamma

mp.mp.dps = 40


def mp_log_gamma_ratio(n, delta):
    return mp.loggamma(mp.mpf(n) + mp.mpf(delta)) - mp.loggamma(mp.mpf(n))


class TestLogGammaRatio:
    def test_integer_shift(self):
        assert log_gamma_ratio(5.0, 1.0) == pytest.approx(math.log(5.0), abs=5e-15)
        # Gamma(1003)/Gamma(1000) = 1000 * 1001 * 1002
        assert log_gamma_ratio(1000.0, 3.0) == pytest.approx(
            math.log(1000 * 1001 * 1002), rel=1e-14
        )

    def test_half_shift_at_one(self):
        # Gamma(1.5) = sqrt(pi)/2
        assert log_gamma_ratio(1.0, 0.5) == pytest.approx(
            math.log(math.sqrt(math.pi) / 2.0), abs=1e-15
        )

    def test_zero_delta_exact(self):
        assert log_gamma_ratio(12345.0, 0.0) == 0.0

    def test_against_mpmath_grid(self):
        # contract: exponentiated relative error <= 1e-12 up to n = 1e7
        worst = 0.0
        for n in (1.0, 1.5, 2.0, 5.0, 9.5, 10.0, 11.0, 31.0, 100.0, 1e3, 1e5, 1e7):
            for delta in (0.0, 1e-9, 0.3, 0.5, 1.0, 2.2, 3.0, 4.0):
                got = log_gamma_ratio(n, delta)
                err = abs(float(mp.e ** (mp.mpf(got) - mp_log_gamma_ratio(n, delta)) - 1))
                worst = max(worst, err)
        assert worst <= 1e-12

    def test_negative_delta(self):
        for n, delta in ((2.0, -0.7), (100.0, -3.5), (1e6, -4.0)):
            got = log_gamma_ratio(n, delta)
            err = abs(float(mp.e ** (mp.mpf(got) - mp_log_gamma_ratio(n, delta)) - 1))
            assert err <= 1e-12

    def test_array_matches_scalar(self):
        ns = np.array([1.0, 4.0, 50.0, 2e6])
        out = log_gamma_ratio(ns, 1.7)
        for n, value in zip(ns, out):
            assert value == pytest.approx(log_gamma_ratio(float(n), 1.7), rel=1e-14)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            log_gamma_ratio(0.5, 1.0)
        with pytest.raises(ValueError):
            log_gamma_ratio(2.0, -2.0)


class TestMartingaleScale:
    def test_first_value(self):
        for alpha in (0.0, 0.3, 0.7, 1.0):
            assert martingale_scale(1, alpha) == pytest.approx(
                1.0 / math.gamma(1.0 + alpha), rel=1e-15
            )

    def test_alpha_one_is_reciprocal(self):
        for n in (1, 2, 10, 1000, 10 ** 6):
            assert martingale_scale(n, 1.0) == pytest.approx(1.0 / n, rel=1e-14)

    def test_known_value(self):
        # Gamma(2)/Gamma(2.5) = 1 / (0.75 sqrt(pi))
        assert martingale_scale(2, 0.5) == pytest.approx(
            1.0 / (0.75 * math.sqrt(math.pi)), rel=1e-14
        )

    def test_product_recurrence(self):
        # a_{n+1} = a_n * n / (n + alpha) to 1e-14 relative
        for alpha in (0.5, 0.75):
            prev = martingale_scale(1, alpha)
            for n in range(1, 20_000):
                nxt = martingale_scale(n + 1, alpha)
                assert abs(nxt * (n + alpha) / (n * prev) - 1.0) <= 1e-14
                prev = nxt

    def test_asymptotic_exponent(self):
        alpha = 0.8
        assert martingale_scale(10 ** 7, alpha) * (10 ** 7) ** alpha == pytest.approx(
            1.0, rel=1e-3
        )

    def test_rejects_bad_alpha(self):
        with pytest.raises(ValueError):
            martingale_scale(5, 1.5)


class TestGammaRatioHelpers:
    def test_poles_give_zero(self):
        assert gamma_ratio(2.0, 0.0) == 0.0
        assert gamma_ratio(2.0, -3.0) == 0.0
        assert recip_gamma(0.0) == 0.0
        assert recip_gamma(-2.0) == 0.0

    def test_negative_argument(self):
        assert gamma_ratio(2.0, -0.5) == pytest.approx(1.0 / math.gamma(-0.5), rel=1e-13)

    def test_large_arguments(self):
        got = gamma_ratio(1e5 + 2.5, 1e5)
        exact = float(mp.gamma(mp.mpf(1e5) + mp.mpf(2.5)) / mp.gamma(mp.mpf(1e5)))
        assert got == pytest.approx(exact, rel=1e-12)

    def test_sign_decomposition(self):
        from erw import GammaRatio

        positive = GammaRatio.of(7.5, 3.0)
        assert positive.sign == 1
        assert positive.value == pytest.approx(
            math.gamma(7.5) / math.gamma(3.0), rel=1e-13
        )
        # Gamma(-0.5) < 0, so the ratio flips sign
        negative = GammaRatio.of(2.0, -0.5)
        assert negative.sign == -1
        assert negative.value < 0.0
        # and Gamma(-1.5) > 0 again
        assert GammaRatio.of(2.0, -1.5).sign == 1
        assert GammaRatio.of(2.0, -1.0).sign == 0

    def test_log_representation_survives_overflow(self):
        from erw import GammaRatio

        huge = GammaRatio.of(400.0, 1.0)  # Gamma(400) itself overflows a double
        assert math.isfinite(huge.log_magnitude)
        assert huge.sign == 1
        assert huge.log_magnitude == pytest.approx(math.lgamma(400.0), rel=1e-14)

    def test_subnormal_denominator_argument(self):
        tiny = 2.2250738585e-313
        assert gamma_ratio(1.0, tiny) == pytest.approx(tiny, rel=1e-9)


class TestGammaSums:
    def test_telescoping_example(self):
        # sum_{j<=10} 1/(j(j+1)) = 1 - 1/11
        assert gamma_sum_linear(0.0, 2.0, 10) == pytest.approx(10.0 / 11.0, rel=1e-14)

    def test_single_terms(self):
        assert gamma_sum_linear(0.0, 2.0, 1) == pytest.approx(0.5, rel=1e-14)
        assert gamma_sum_weighted(0.0, 3.0, 1) == pytest.approx(1.0 / 6.0, rel=1e-14)

    def test_weighted_partial_fractions(self):
        # sum j * Gamma(j)/Gamma(j+3) = sum 1/((j+1)(j+2))
        direct = math.fsum(1.0 / ((j + 1) * (j + 2)) for j in range(1, 51))
        assert gamma_sum_weighted(0.0, 3.0, 50) == pytest.approx(direct, rel=1e-12)

    def test_against_direct_summation(self):
        assert gamma_sum_linear(0.5, 3.2, 200) == pytest.approx(
            gamma_sum_linear_direct(0.5, 3.2, 200), rel=1e-12
        )
        assert gamma_sum_weighted(1.5, 4.0, 300) == pytest.approx(
            gamma_sum_weighted_direct(1.5, 4.0, 300), rel=1e-11
        )

    @settings(max_examples=150, deadline=None)
    @given(
        st.floats(0.0, 4.0),
        st.floats(0.0, 4.0),
        st.integers(1, 1000),
    )
    def test_random_cases(self, a, b, n):
        if abs(b - a - 1.0) < 0.05 or abs(b - a - 2.0) < 0.05:
            return
        linear = gamma_sum_linear(a, b, n)
        assert linear == pytest.approx(gamma_sum_linear_direct(a, b, n), rel=1e-10)
        weighted = gamma_sum_weighted(a, b, n)
        assert weighted == pytest.approx(gamma_sum_weighted_direct(a, b, n), rel=1e-10)

    def test_singular_guards(self):
        with pytest.raises(SingularParameterError, match="b - a - 1"):
            gamma_sum_linear(1.0, 2.0, 5)
        with pytest.raises(SingularParameterError, match="b - a - 2"):
            gamma_sum_weighted(1.0, 3.0, 5)
        with pytest.raises(ValueError):
            gamma_sum_linear(-0.5, 2.0, 5)


class TestRecursionSolver:
    def test_initial_value(self):
        spec = RecursionSpec.constant(2.0, 1.0, 1.0)
        assert solve_recursion(spec, 1) == pytest.approx(1.0, rel=1e-14)

    def test_one_step_by_hand(self):
        # b_2 = (1 + 2/1) * 1 + 1 = 4
        spec = RecursionSpec.constant(2.0, 1.0, 1.0)
        assert solve_recursion(spec, 2) == pytest.approx(4.0, rel=1e-14)

    def test_constant_case_long_run(self):
        beta, c = 1.5, 2.0
        spec = RecursionSpec.constant(beta, c, c)
        iterated = iterate_recursion(spec, 500)[-1]
        assert solve_recursion_constant(beta, c, 500) == pytest.approx(iterated, rel=1e-10)
        assert solve_recursion(spec, 500) == pytest.approx(iterated, rel=1e-10)

    def test_constant_case_beta_one_guard(self):
        with pytest.raises(SingularParameterError, match="beta - 1"):
            solve_recursion_constant(1.0 + 1e-12, 1.0, 10)

    @settings(max_examples=100, deadline=None)
    @given(
        st.floats(0.05, 4.0),
        st.floats(0.1, 2.0),
        st.integers(2, 300),
        st.lists(st.floats(0.0, 3.0), min_size=300, max_size=300),
    )
    def test_solution_satisfies_recursion(self, beta, b1, n, c_values):
        spec = RecursionSpec.from_sequence(beta, b1, c_values)
        iterated = iterate_recursion(spec, n)
        solved = solve_recursion(spec, n)
        assert solved == pytest.approx(iterated[-1], rel=1e-10, abs=1e-12)
        # stepping the solved value forward reproduces the recursion
        if n >= 2:
            forward = (1.0 + beta / (n - 1)) * solve_recursion(spec, n - 1) + spec.c_seq(n - 1)
            assert solved == pytest.approx(forward, rel=1e-10, abs=1e-12)

    def test_rejects_nonpositive_beta(self):
        with pytest.raises(ValueError):
            RecursionSpec.constant(0.0, 1.0, 1.0)


class TestTailAsymptotics:
    def test_linear_sum_tail(self):
        # sum_{j=1}^{n-1} Gamma(j+3a)/Gamma(j+1+4a) converges to
        # Gamma(3a+1)/(a Gamma(4a+1)); within 1% at n = 1e5 for a = 0.75
        alpha = 0.75
        partial = gamma_sum_linear(3 * alpha, 1 + 4 * alpha, 10 ** 5 - 1)
        limit = gamma_ratio(3 * alpha + 1.0, 4 * alpha + 1.0) / alpha
        assert partial == pytest.approx(limit, rel=0.01)
