import dataclasses
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zetamoments.errors import AccuracyError, PoleError, ValidationError
from zetamoments.special_fn import chi, log_gamma
from zetamoments.zeta_engine import (DEFAULT_CONFIG, ZeroTable, argument_principle_count, find_zeros,
                                     gram_points, hardy_z, landau_gonek_check, nearest_prime_power_distance,
                                     riemann_von_mangoldt, theta, von_mangoldt_real, zeta, zeta_and_prime,
                                     zeta_prime, zeta_prime_at_zeros, zeta_prime_values, zeros_from_ordinates)

# mpmath at 30 digits
ZETA_HALF = -1.46035450880958681288949915252
ZETA_LOGDERIV_2 = -0.56996099309453280639986436002
GAMMA_1 = 14.1347251417346937904572519836
GAMMA_2 = 21.0220396387715549926284795939
ABS_ZETA_PRIME_RHO1 = 0.793160433356506116013897565274
ZETA_03_7I = complex(1.01713149889509368387077802394, 0.439444006896340596832437607402)
ZETA_1000 = complex(0.356334367194396055074402476711, 0.931997831232993665115060432737)
ZETA_PRIME_1000 = complex(3.54683961443364571551878418399, -4.06399158664659553607409492399)


class TestZeta:
    def test_classical_values(self):
        assert zeta(2.0) == pytest.approx(math.pi**2 / 6, rel=1e-12)
        assert abs(zeta(0.5) - ZETA_HALF) <= 1e-9

    def test_frozen_reference_points(self):
        assert abs(zeta(0.3 + 7j) / ZETA_03_7I - 1) <= 1e-12
        assert abs(zeta(0.5 + 1000j) / ZETA_1000 - 1) <= 1e-10
        assert abs(zeta_prime(0.5 + 1000j) / ZETA_PRIME_1000 - 1) <= 1e-10

    def test_logderivative_against_dirichlet_series(self):
        v, dv = zeta_and_prime(2.0)
        assert (dv / v).real == pytest.approx(ZETA_LOGDERIV_2, abs=1e-13)
        N = 10**5
        n = np.arange(2, N + 1)
        lam = np.array([von_mangoldt_real(float(k)) for k in n])
        partial = -math.fsum(lam / n.astype(float) ** 2)
        # Chebyshev: sum_{n > N} Lambda(n)/n^2 ~ 1/N
        assert (dv / v).real == pytest.approx(partial - 1.0 / N, abs=2e-6)

    @settings(max_examples=40, deadline=None)
    @given(st.floats(0.0, 1.0), st.floats(2.0, 10_000.0))
    def test_relative_accuracy_against_mpmath(self, sigma, t):
        s = complex(sigma, t)
        ref = complex(mpmath.zeta(s))
        if abs(ref) < 1e-6:
            return
        assert abs(zeta(s) / ref - 1) <= 1e-10

    def test_pole_and_ceiling(self):
        with pytest.raises(PoleError):
            zeta(1.0)
        with pytest.raises(AccuracyError):
            zeta(0.5 + 2e5j)

    @settings(max_examples=100, deadline=None)
    @given(st.floats(0.2, 0.8), st.floats(2.0, 500.0))
    def test_functional_equation(self, sigma, t):
        s = complex(sigma, t)
        assert abs(zeta(s) - chi(s) * zeta(1 - s)) <= 1e-9 * abs(zeta(s))

    def test_derivative_against_finite_differences(self, rng):
        t = rng.uniform(10, 500, 50)
        h = 1e-5
        s = 0.5 + 1j * t
        fd = (zeta(s + h) - zeta(s - h)) / (2 * h)
        assert np.max(np.abs(fd - zeta_prime(s))) <= 1e-6

    def test_batch_independence(self, rng):
        s = 0.5 + 1j * rng.uniform(10, 3000, 97)
        whole = zeta(s)
        parts = np.array([zeta(x) for x in s])
        assert np.array_equal(whole, parts)


class TestHardyZ:
    def test_real_valued(self, rng):
        t = rng.uniform(2, 5000, 200)
        z, im = hardy_z(t, return_imag=True)
        # relative bound away from zeros of Z; absolute round-off floor everywhere
        away = np.abs(z) >= 1e-3
        assert np.all(np.abs(im[away]) <= 1e-9 * np.abs(z[away]))
        assert np.all(np.abs(im) <= 1e-10)

    def test_first_zero_brackets(self):
        assert hardy_z(14.0) * hardy_z(14.2) < 0
        assert hardy_z(20.9) * hardy_z(21.1) < 0

    def test_theta_against_log_gamma(self):
        t = 100.0
        ref = log_gamma(0.25 + 0.5j * t).imag - 0.5 * t * math.log(math.pi)
        assert theta(t) == pytest.approx(ref, abs=1e-9)
        assert theta(t) == pytest.approx(87.9721652317872196254831291138, abs=1e-12)

    def test_gram_points(self):
        g = gram_points(-1, 40)
        ref = [float(mpmath.grampoint(n)) for n in range(-1, 41)]
        assert np.max(np.abs(g - ref)) < 1e-10


class TestZeros:
    def test_first_zeros(self, zeros100):
        assert abs(zeros100.ordinates[0] - GAMMA_1) <= 1e-6
        assert abs(zeros100.ordinates[1] - GAMMA_2) <= 1e-9
        assert len(zeros100) == 29

    def test_argument_principle(self):
        assert argument_principle_count(100.0) == 29
        assert argument_principle_count(1000.0) == 649

    def test_prefix_counts(self, zeros):
        g = zeros.upto(5000)
        j = np.arange(1, g.size + 1)
        rvm = riemann_von_mangoldt(g)
        slack = 3 * np.log(g)
        assert np.all(np.abs(j - rvm) <= slack) and np.all(np.abs(j - 1 - rvm) <= slack)
        T = 5000.0
        assert abs(zeros.count(T) - riemann_von_mangoldt(T)) <= 3 * math.log(T)

    def test_sign_change_across_every_zero(self, zeros):
        g = zeros.ordinates
        assert np.all(hardy_z(g - 1e-9) * hardy_z(g + 1e-9) < 0)

    def test_against_mpmath(self, zeros):
        for n in (1, 17, 649, 2000, 4519, len(zeros)):
            assert abs(zeros.ordinates[n - 1] - float(mpmath.zetazero(n).imag)) <= 1e-9

    def test_thread_count_does_not_matter(self):
        one = find_zeros(400.0)
        four = find_zeros(400.0, dataclasses.replace(DEFAULT_CONFIG, workers=4))
        assert np.array_equal(one.ordinates, four.ordinates)

    def test_below_first_zero(self):
        assert len(find_zeros(10.0)) == 0

    def test_ceiling(self):
        with pytest.raises(AccuracyError):
            find_zeros(2e5)


class TestZeroTable:
    def test_readonly_and_queries(self, zeros100):
        with pytest.raises(ValueError):
            zeros100.ordinates[0] = 1.0
        assert zeros100.count(50) == 10
        assert zeros100.prefix(50).t_max == 50
        assert zeros100.between(20, 30).size == 2

    def test_validation(self):
        with pytest.raises(ValidationError):
            ZeroTable(np.array([14.1, 14.0]), 20.0).validate()
        with pytest.raises(ValidationError):
            ZeroTable(np.array([15.2, 21.0]), 30.0).validate()
        with pytest.raises(ValidationError):
            ZeroTable(np.linspace(14.13, 29.0, 40), 30.0).validate()  # far above N(30) = 3

    def test_from_ordinates(self):
        t = zeros_from_ordinates([14.134725141734695])
        assert len(t) == 1 and t.source == "ingested"


class TestZetaPrimeAtZeros:
    def test_first_value(self, zeros100):
        v = zeta_prime_at_zeros(zeros100)
        assert v[0].gamma == zeros100.ordinates[0]
        assert abs(v[0].zeta_prime) == pytest.approx(ABS_ZETA_PRIME_RHO1, abs=1e-9)

    def test_reflection(self, zeros100):
        g = zeros100.ordinates
        rho = 0.5 + 1j * g
        a = zeta_prime(rho)
        b = zeta_prime(1 - rho)
        assert np.allclose(b, -chi(1 - rho) * a, rtol=0, atol=1e-8)
        assert np.max(np.abs(np.abs(b) - np.abs(a))) <= 1e-8

    def test_nonzero_up_to_5000(self, zeros):
        vals = zeta_prime_values(zeros, count=zeros.count(5000))
        assert np.all(np.isfinite(vals)) and np.all(np.abs(vals) > 0)

    def test_cache_serves_prefixes(self, zeros100):
        a = zeta_prime_values(zeros100, count=5)
        b = zeta_prime_values(zeros100)
        assert np.array_equal(a, b[:5])


class TestLandauGonek:
    @pytest.mark.parametrize("x", [2, 3, 4, 6])
    @pytest.mark.parametrize("T", [1000.0, 2000.0])
    def test_within_bound(self, zeros, x, T):
        assert landau_gonek_check(x, zeros, T).passed

    def test_main_terms(self, zeros):
        assert landau_gonek_check(6, zeros, 2000.0).main_term == 0.0
        r = landau_gonek_check(4, zeros, 1000.0)
        assert r.main_term == pytest.approx(-(1000 / (2 * math.pi)) * math.log(2), rel=1e-15)
        g = zeros.upto(1000.0)
        direct = sum(complex(4 ** (0.5 + 1j * x)) for x in g)
        assert abs(r.lhs - direct) <= 1e-9 * abs(direct)

    def test_helpers(self):
        assert von_mangoldt_real(8.0) == pytest.approx(math.log(2))
        assert von_mangoldt_real(6.0) == 0.0 and von_mangoldt_real(2.5) == 0.0
        assert nearest_prime_power_distance(6.0) == 1.0
        assert nearest_prime_power_distance(4.0) == 1.0
        assert nearest_prime_power_distance(2.0) == 1.0

    def test_coverage(self, zeros100):
        with pytest.raises(ValueError):
            landau_gonek_check(2, zeros100, 200.0)
