import math
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from zetamoments.arith import (a_k, alpha_prime_power_coeffs, build_alpha, build_tables, d_k,
                               d_k_prime_power, delta_multiplicative, dirichlet_convolve, divisors,
                               factorize, gcd_weighted_double_sum, gcd_weighted_euler_product, primes_up_to,
                               split_convolution)
from zetamoments.errors import CapacityError, DomainError
from zetamoments.special_fn import EULER_GAMMA

SIX_OVER_PI2 = 6 / math.pi**2
SMALL_PRIMES = [int(p) for p in primes_up_to(60)]


@pytest.fixture(scope="module")
def tables():
    return build_tables(10**4, 30.0)


def _naive_mu(n):
    f = sympy.factorint(n)
    return 0 if any(a > 1 for a in f.values()) else (-1) ** len(f)


def _naive_lambda(n):
    f = sympy.factorint(n)
    return math.log(next(iter(f))) if len(f) == 1 else 0.0


class TestTables:
    def test_against_trial_division(self, tables):
        for n in range(1, 10**4 + 1):
            assert tables.moebius[n] == _naive_mu(n)
            assert tables.von_mangoldt[n] == pytest.approx(_naive_lambda(n), abs=1e-15)
            assert bool(tables.is_smooth[n]) == all(p <= 30 for p in sympy.factorint(n))
            assert tables.totient[n] == sympy.totient(n)

    def test_invariants(self, tables):
        assert tables.is_smooth[1]
        n = np.arange(1, tables.limit + 1)
        assert np.all((tables.von_mangoldt[1:] != 0) == (tables.pp_base[1:] > 0))
        sq = n[(n % 4 == 0)]
        assert np.all(tables.moebius[sq] == 0)

    def test_factor(self, tables):
        assert tables.factor(360) == [(2, 3), (3, 2), (5, 1)]
        assert factorize(9973) == [(9973, 1)]
        with pytest.raises(CapacityError):
            tables.factor(10**5)

    def test_capacity(self):
        with pytest.raises(CapacityError):
            build_tables(10**8)


class TestDivisorFunction:
    def test_examples(self):
        assert d_k(2, 2**3) == 4
        assert d_k(-1, 7) == -1
        assert d_k(-1, 49) == 0
        assert d_k(0.5, 4) == pytest.approx(3 / 8, abs=1e-16)

    @settings(max_examples=200)
    @given(st.integers(-3, 4), st.integers(0, 12))
    def test_integer_k_is_binomial(self, k, a):
        assert d_k_prime_power(k, a) == pytest.approx(float(sympy.binomial(k + a - 1, a)), abs=1e-9)

    @settings(max_examples=100)
    @given(st.integers(1, 300), st.integers(1, 300))
    def test_d2_counts_divisors(self, m, n):
        assert d_k(2, m * n) == len(divisors(m * n))


class TestAlpha:
    def test_small_n_values(self):
        al = build_alpha(-1, 100.0, 10**4)
        for p in primes_up_to(100):
            assert al[int(p)] == -1.0
        for p in primes_up_to(10):
            assert al[int(p) ** 2] == 0.0

    def test_hand_recursion_x10(self):
        al = build_alpha(-1, 10.0, 100)
        assert al[4] == 0.0  # 2 alpha(4) = -(alpha(2) + alpha(1))

    def test_symbolic_expansion_x10(self):
        # exp(-(x + x^2/2 + x^3/3)) for the prime 2 when X = 10
        x = sympy.symbols("x")
        series = sympy.series(sympy.exp(-(x + x**2 / 2 + x**3 / 3)), x, 0, 7).removeO()
        coeffs = alpha_prime_power_coeffs(-1, 3, 6)
        for a in range(7):
            assert coeffs[a] == pytest.approx(float(series.coeff(x, a)), abs=1e-15)

    def test_support(self):
        al = build_alpha(1.5, 12.0, 5000)
        n = al.support()
        assert set(int(v) for v in n) == {m for m in range(1, 5001) if all(p <= 12 for p in sympy.factorint(m))}
        assert al[1] == 1.0
        with pytest.raises(CapacityError):
            al[5001]

    def test_domain(self):
        with pytest.raises(DomainError):
            build_alpha(1, 1.5, 10)
        with pytest.raises(CapacityError):
            build_alpha(1, 10, 10**8)

    @pytest.mark.parametrize("k", [-2, -1, -0.5, 0.5, 1, 2])
    @pytest.mark.parametrize("X", [2, 5, 10, 30, 100])
    def test_divisor_bound(self, k, X):
        al = build_alpha(k, X, 10**4)
        bound = np.array([0.0] + [abs(d_k(abs(k), n)) for n in range(1, 10**4 + 1)])
        assert np.all(np.abs(al.values[1:]) <= bound[1:] * (1 + 1e-12))

    @settings(max_examples=500, deadline=None)
    @given(st.sampled_from([-2.0, -1.0, -0.5, 0.5, 1.0, 1.5, 2.0, 3.0]), st.sampled_from(SMALL_PRIMES[:8]),
           st.integers(1, 8), st.floats(2, 400))
    def test_agrees_with_d_k_inside_range(self, k, p, a, X):
        # the recursion is untruncated only while every power p^l, l <= a, is <= X
        if p**a > X:
            return
        c = alpha_prime_power_coeffs(k, int(math.floor(math.log(X) / math.log(p) + 1e-12)), a)
        assert c[a] == pytest.approx(d_k_prime_power(k, a), rel=1e-12, abs=1e-15)

    @settings(max_examples=1000, deadline=None)
    @given(st.integers(1, 3000), st.integers(1, 3000), st.sampled_from([-1.0, 0.5, 2.0]))
    def test_multiplicative(self, m, n, k):
        if math.gcd(m, n) != 1 or m * n > 10**6:
            return
        al = _alpha_cache(k)
        lhs, rhs = al[m * n], al[m] * al[n]
        assert lhs == pytest.approx(rhs, rel=1e-13, abs=1e-300)


_ALPHA = {}


def _alpha_cache(k):
    if k not in _ALPHA:
        _ALPHA[k] = build_alpha(k, 30.0, 10**6)
    return _ALPHA[k]


class TestArithmeticFactor:
    def test_a1(self):
        assert abs(a_k(1, 10**6).value - 1) <= 1e-8

    def test_a_minus1(self):
        r = a_k(-1, 10**6)
        assert abs(r.value - SIX_OVER_PI2) <= 1e-6

    def test_a2(self):
        assert abs(a_k(2, 10**6).value - SIX_OVER_PI2) <= 1e-5
        # classical fourth moment constant a_2 G^2(3)/G(5) = 1/(2 pi^2)
        assert a_k(2, 10**6).value / 12 == pytest.approx(1 / (2 * math.pi**2), rel=1e-6)

    def test_brute_force_product(self):
        # local factor for k = -1 is 1 - p^-2
        P = 10**4
        ref = math.prod(1 - 1 / float(p) ** 2 for p in primes_up_to(P))
        assert a_k(-1, P).value == pytest.approx(ref, rel=1e-13)

    def test_truncation_within_tail_bounds(self):
        a4, a5, a6 = (a_k(-1, P) for P in (10**4, 10**5, 10**6))
        assert abs(a5.value - a4.value) <= a4.tail_bound
        assert abs(a6.value - a5.value) <= a5.tail_bound
        assert abs(SIX_OVER_PI2 - a6.value) <= a6.tail_bound

    def test_fractional_k_local_series(self):
        # for k = 1/2 compare one prime's factor against exact rationals
        p = 3
        terms = [Fraction(1)]
        c = Fraction(1)
        for m in range(1, 60):
            c *= Fraction(2 * m - 1, 2 * m)
            terms.append(c * c / Fraction(p) ** m)
        ref = float(sum(terms)) * (1 - 1 / p) ** 0.25
        two = a_k(0.5, 2).value
        three = a_k(0.5, 3).value
        assert three / two == pytest.approx(ref, rel=1e-13)

    def test_domain(self):
        with pytest.raises(DomainError):
            a_k(1, 1)


class TestDelta:
    def test_examples(self):
        assert delta_multiplicative(1) == 1
        assert delta_multiplicative(2) == pytest.approx(4 / 3, rel=1e-15)
        assert delta_multiplicative(4) == pytest.approx(5 / 3, rel=1e-15)
        assert delta_multiplicative(12) == pytest.approx(5 / 3 * (1 + 0.5), rel=1e-15)


class TestConvolution:
    def test_divisor_count(self):
        ones = np.ones(101)
        assert dirichlet_convolve(ones, ones, 100)[12] == 6

    def test_moebius_inversion(self, tables):
        out = dirichlet_convolve(tables.moebius.astype(float), np.ones(tables.limit + 1), 2000)
        assert out[1] == 1 and np.all(out[2:] == 0)

    def test_inverse_pair_on_small_smooth_numbers(self):
        X = 100
        lim = X
        plus = build_alpha(1, X, lim).values
        minus = build_alpha(-1, X, lim).values
        conv = dirichlet_convolve(plus, minus, lim)
        for n in range(1, lim + 1):
            if all(p * p <= X for p in sympy.factorint(n)) or n == 1:
                assert conv[n] == pytest.approx(1.0 if n == 1 else 0.0, abs=1e-13)

    def test_mapping_input(self):
        out = dirichlet_convolve({1: 1.0, 2: 2.0}, {1: 1.0, 3: 1.0}, 10)
        assert out[6] == 2.0 and out[3] == 1.0 and out[2] == 2.0

    @settings(max_examples=200, deadline=None)
    @given(st.integers(1, 60), st.integers(1, 60), st.sampled_from([-1.0, 0.5, 2.0]), st.sampled_from([-1.0, 1.0]))
    def test_split_identity(self, l, m, k1, k2):
        a1, a2 = _alpha_small(k1), _alpha_small(k2)
        conv = dirichlet_convolve(a1.values, a2.values, 3600)
        assert split_convolution(a1, a2, l, m) == pytest.approx(conv[l * m], rel=1e-12, abs=1e-12)


_SMALL = {}


def _alpha_small(k):
    if k not in _SMALL:
        _SMALL[k] = build_alpha(k, 20.0, 3600)
    return _SMALL[k]


class TestGcdSum:
    def test_brute_force_x4(self):
        X, cutoff = 4.0, 10**4
        al = build_alpha(-1, X, cutoff)
        n = al.support()
        v = al.values[n] / n
        g = np.gcd.outer(n, n).astype(float)
        ref = math.fsum((np.outer(v, v) * g).ravel())
        assert gcd_weighted_double_sum(-1, X, cutoff) == pytest.approx(ref, rel=1e-12)

    def test_identity_coefficients(self, tables):
        class Unit:
            values = np.zeros(tables.limit + 1)
        Unit.values[1] = 1.0
        assert gcd_weighted_double_sum(-1, 30.0, tables.limit, tables, Unit) == 1.0

    def test_euler_product_is_the_limit(self):
        full = gcd_weighted_euler_product(-1, 4.0)
        assert gcd_weighted_double_sum(-1, 4.0, 10**6) == pytest.approx(full, rel=1e-6)

    def test_asymptotic_normalisation(self):
        X = 1000.0
        val = gcd_weighted_double_sum(-1, X, None) * math.exp(EULER_GAMMA) * math.log(X)
        assert 0.8 <= val <= 1.2
