import cmath
import math

import numpy as np
import pytest
from scipy.special import gammaln

from infrastructure import ConvergenceError, DomainError, RangeOverflowError
from special_functions import (
    CompensatedSum,
    bessel_i,
    bilateral_laguerre_closed,
    bilateral_laguerre_series,
    bilinear_hypergeometric_closed,
    bilinear_hypergeometric_series,
    binomial_tail_bound,
    binomial_tail_terms,
    hille_hardy_kernel,
    hille_hardy_series,
    hyp1f1,
    hyp1f1_scaled,
    hyp2f1,
    hyp2f1_connection,
    hyp2f1_series,
    hyp2f1_terminating,
    jacobi_expansion,
    laguerre,
    laguerre_table,
    log_bessel_i,
    log_bessel_i_reduced,
    log_hille_hardy_kernel,
    log_pochhammer,
    pochhammer,
    rising_over_factorial,
)
from tests import oracles


class TestPochhammer:
    def test_small_products(self):
        assert pochhammer(0.5, 3) == pytest.approx(1.875, rel=1e-15)
        assert pochhammer(-2.0, 3) == 0.0
        assert pochhammer(4.0, 0) == 1.0

    def test_large_index_uses_gamma_ratio(self):
        assert math.log(pochhammer(2.5, 40)) == pytest.approx(log_pochhammer(2.5, 40), rel=1e-13)
        assert log_pochhammer(2.5, 40) == pytest.approx(float(gammaln(42.5) - gammaln(2.5)), rel=1e-14)

    def test_overflow_and_domain(self):
        with pytest.raises(RangeOverflowError):
            pochhammer(1.0, 200)
        with pytest.raises(DomainError):
            pochhammer(1.0, -1)
        with pytest.raises(DomainError):
            log_pochhammer(-0.5, 3)

    def test_rising_over_factorial(self):
        np.testing.assert_allclose(rising_over_factorial(1.0, 6), np.ones(7))
        np.testing.assert_allclose(rising_over_factorial(2.0, 4), [1, 2, 3, 4, 5])


def test_compensated_sum_recovers_small_terms():
    acc = CompensatedSum(1.0)
    for _ in range(10000):
        acc.add(1e-16)
    assert acc.total == pytest.approx(1.0 + 1e-12, rel=1e-15)


class TestTailBounds:
    @pytest.mark.parametrize("c,r,tol", [(1.0, 0.5, 1e-12), (2.5, 0.9, 1e-14), (4.0, math.exp(-0.1), 1e-15)])
    def test_smallest_admissible_size(self, c, r, tol):
        n = binomial_tail_terms(c, r, tol)
        assert binomial_tail_bound(c, r, n) <= tol
        assert n == 0 or binomial_tail_bound(c, r, n - 1) > tol

    def test_bound_dominates_true_tail(self):
        c, r, n = 2.5, 0.8, 30
        m = np.arange(n + 1, 2000)
        tail = math.fsum(np.exp(gammaln(c + m) - gammaln(c) - gammaln(m + 1.0) + m * math.log(r)))
        assert tail <= binomial_tail_bound(c, r, n)

    def test_budget_exceeded(self):
        with pytest.raises(ConvergenceError) as info:
            binomial_tail_terms(1.0, 0.9999, 1e-15, max_terms=100)
        assert info.value.terms_used == 100

    def test_ratio_domain(self):
        with pytest.raises(DomainError):
            binomial_tail_terms(1.0, 1.0, 1e-12)
        assert binomial_tail_terms(1.0, 0.0, 1e-12) == 0


class TestGauss:
    @pytest.mark.parametrize("n,b,c", [(0, 1.75, 2.5), (3, 1.75, 2.5), (7, 1.25, 1.5), (12, 2.5, 4.0)])
    def test_terminating(self, n, b, c):
        z = 1.0 - cmath.exp(0.9j)
        ref = oracles.hyp2f1(-n, b, c, z)
        assert abs(hyp2f1_terminating(n, b, c, z) - ref) <= 1e-13 * max(1.0, abs(ref))

    def test_terminating_pole(self):
        with pytest.raises(DomainError):
            hyp2f1_terminating(3, 1.0, -1.0, 0.5)

    @pytest.mark.parametrize("gamma", [0.5, 1.5, 3.0])
    def test_jacobi_expansion(self, gamma):
        theta = 2.3
        values = jacobi_expansion(10, 0.5 * gamma + 1.0, gamma + 1.0, cmath.exp(1j * theta))
        for n in range(11):
            ref = oracles.circular_jacobi(n, gamma, theta)
            assert abs(values[n] - ref) <= 1e-12 * max(1.0, abs(ref))

    @pytest.mark.parametrize("x", [0.0, 0.1, 0.3, 0.5, 0.51, 0.7, 0.9, 0.99])
    def test_real_2f1(self, x):
        a = b = 1.75
        c = 2.5
        assert hyp2f1(a, b, c, x) == pytest.approx(oracles.hyp2f1(a, b, c, x).real, rel=1e-12)

    def test_routes_agree_near_half(self):
        a = b = 1.25
        c = 1.5
        for x in (0.45, 0.5, 0.55):
            series = hyp2f1_series(a, b, c, x).real
            connection = hyp2f1_connection(a, b, c, x).real
            assert series == pytest.approx(connection, rel=1e-12)

    def test_complement_near_one(self):
        a = b = 1.5
        w = 1e-7
        assert hyp2f1(a, b, 2.0, 0.0, complement=w) == pytest.approx(oracles.hyp2f1_near_one(a, b, 2.0, w), rel=1e-12)

    def test_integer_parameters_use_leading_term(self):
        # a - 1 = 0 kills the logarithmic part: 2F1(1, 2; 2; x) = 1/(1-x)
        assert hyp2f1(1.0, 2.0, 2.0, 0.8) == pytest.approx(5.0, rel=1e-14)

    def test_domain(self):
        with pytest.raises(DomainError):
            hyp2f1(1.0, 1.0, 3.0, 0.7)
        with pytest.raises(DomainError):
            hyp2f1(-1.0, 1.0, 1.0, 0.2)
        with pytest.raises(DomainError):
            hyp2f1(1.0, 1.0, 1.0, 1.0)


class TestConfluent:
    def test_terminating_route(self):
        result = hyp1f1(-3.0, 1.5, 2.0)
        assert result.route == "terminating"
        assert result.tail_bound == 0.0
        assert result.real == pytest.approx(oracles.hyp1f1(-3.0, 1.5, 2.0).real, rel=1e-14)

    @pytest.mark.parametrize("z,route", [(10.0, "series"), (-5.0, "kummer+series"), (60.0, "asymptotic"), (-60.0, "kummer+asymptotic")])
    def test_routes(self, z, route):
        result = hyp1f1(1.5, 2.5, z)
        assert result.route == route
        ref = oracles.hyp1f1(1.5, 2.5, z)
        assert abs(result.value - ref) <= 1e-12 * abs(ref)

    @pytest.mark.parametrize("z", [3.0 + 4.0j, 20.0 - 10.0j, 50.0 + 30.0j, -8.0 + 2.0j])
    def test_scaled_complex(self, z):
        ref = oracles.hyp1f1_scaled(2.0, 3.0, z)
        assert abs(hyp1f1_scaled(2.0, 3.0, z).value - ref) <= 1e-11 * abs(ref)

    @pytest.mark.parametrize("z", [14.5 - 36.5j, 5.0 - 39.0j, 1.0 + 39.5j, 0.5 + 20.0j, 2.0 - 25.0j])
    def test_oscillating_argument_inside_series_radius(self, z):
        # |z| - Re z is large: the Taylor partial sums lose all digits
        result = hyp1f1(1.75, 2.5, z)
        assert result.route == "beta"
        ref = oracles.hyp1f1(1.75, 2.5, z)
        assert abs(result.value - ref) <= 1e-12 * abs(ref)
        scaled = oracles.hyp1f1_scaled(1.75, 2.5, z)
        assert abs(hyp1f1_scaled(1.75, 2.5, z).value - scaled) <= 1e-12 * abs(scaled)

    def test_oscillating_argument_left_half_plane(self):
        z = -5.0 + 39.0j
        result = hyp1f1(1.75, 2.5, z)
        assert result.route.startswith("kummer+")
        ref = oracles.hyp1f1(1.75, 2.5, z)
        assert abs(result.value - ref) <= 1e-12 * abs(ref)

    def test_exponential_route(self):
        z = 3.0 + 4.0j
        result = hyp1f1(1.0, 1.0, z)
        assert result.route == "exponential"
        assert abs(result.value - cmath.exp(z)) <= 1e-15 * abs(cmath.exp(z))
        assert hyp1f1_scaled(1.0, 1.0, z).value == 1.0

    def test_unresolved_raises(self):
        # a > c rules out the Beta mean and the second asymptotic sum stalls at |z| = 20
        with pytest.raises(ConvergenceError, match="unresolved"):
            hyp1f1(3.25, 1.5, 1.0 + 20.0j)

    def test_unscaled_overflow(self):
        with pytest.raises(RangeOverflowError):
            hyp1f1(1.5, 2.5, 800.0)
        ref = oracles.hyp1f1_scaled(1.5, 2.5, 800.0)
        assert abs(hyp1f1_scaled(1.5, 2.5, 800.0).value - ref) <= 1e-12 * abs(ref)

    def test_domain(self):
        with pytest.raises(DomainError):
            hyp1f1(1.0, 0.0, 1.0)
        with pytest.raises(DomainError):
            hyp1f1(1.0, 1.0, complex(float("nan"), 0.0))


class TestLaguerre:
    @pytest.mark.parametrize("nu", [0.5, 1.5, 2.5])
    def test_against_reference(self, nu):
        x = np.array([0.0, 0.3, 1.7, 5.0, 12.0, 20.0])
        table = laguerre_table(10, nu, x)
        for n in range(11):
            ref = np.array([oracles.laguerre(n, nu, v) for v in x])
            np.testing.assert_allclose(table[n], ref, rtol=1e-11, atol=1e-12 * np.max(np.abs(ref)))

    def test_scalar_and_domain(self):
        assert laguerre(1, 0.5, 1.0) == pytest.approx(0.5)
        assert isinstance(laguerre(2, 0.5, 1.0), float)
        with pytest.raises(DomainError):
            laguerre(2, 0.5, -1.0)
        with pytest.raises(DomainError):
            laguerre_table(3, -1.5, 1.0)


class TestBessel:
    @pytest.mark.parametrize("nu", [0.0, 0.5, 1.5, 3.2])
    @pytest.mark.parametrize("x", [0.1, 1.0, 10.0, 29.9, 30.1, 100.0, 500.0])
    def test_log_bessel(self, nu, x):
        ref = oracles.log_bessel_i(nu, x)
        assert abs(log_bessel_i(nu, x) - ref) <= 1e-11 * max(1.0, abs(ref))

    def test_reduced_at_zero(self):
        assert log_bessel_i_reduced(1.5, 0.0) == pytest.approx(-float(gammaln(2.5)), rel=1e-15)
        assert log_bessel_i(1.5, 0.0) == -math.inf
        assert log_bessel_i(0.0, 0.0) == 0.0

    def test_half_integer_closed_form(self):
        x = np.array([0.2, 2.0, 25.0, 40.0])
        np.testing.assert_allclose(bessel_i(0.5, x), np.sqrt(2.0 / (math.pi * x)) * np.sinh(x), rtol=1e-12)

    def test_overflow_and_domain(self):
        with pytest.raises(RangeOverflowError):
            bessel_i(0.0, 800.0)
        with pytest.raises(DomainError):
            log_bessel_i_reduced(-0.5, 1.0)
        with pytest.raises(DomainError):
            log_bessel_i_reduced(0.5, -1.0)


class TestKernel:
    @pytest.mark.parametrize("tau,xi,zeta,alpha", [(0.5, 1.3, 2.1, 2.5), (0.3, 0.5, 0.5, 1.6), (0.8, 4.0, 6.0, 3.5)])
    def test_closed_form(self, tau, xi, zeta, alpha):
        ref = oracles.hille_hardy(tau, xi, zeta, alpha)
        assert hille_hardy_kernel(tau, xi, zeta, alpha) == pytest.approx(ref, rel=1e-12)
        assert hille_hardy_series(tau, xi, zeta, alpha, n_terms=400) == pytest.approx(ref, rel=1e-10)

    def test_symmetric_and_regular_at_origin(self):
        tau, alpha = 0.6, 2.5
        assert log_hille_hardy_kernel(tau, 1.1, 3.7, alpha) == log_hille_hardy_kernel(tau, 3.7, 1.1, alpha)
        # xi = 0 leaves (1-tau)^{-alpha} e^{-tau zeta/(1-tau)} / G(alpha)
        expected = -alpha * math.log(1.0 - tau) - tau * 2.0 / (1.0 - tau) - float(gammaln(alpha))
        assert log_hille_hardy_kernel(tau, 0.0, 2.0, alpha) == pytest.approx(expected, rel=1e-14)

    def test_domain(self):
        with pytest.raises(DomainError):
            log_hille_hardy_kernel(1.0, 1.0, 1.0, 2.5)
        with pytest.raises(DomainError):
            log_hille_hardy_kernel(0.5, 1.0, 1.0, 1.2)
        with pytest.raises(DomainError):
            log_hille_hardy_kernel(0.5, -1.0, 1.0, 2.5)


class TestIdentities:
    @pytest.mark.parametrize("gamma,r,theta", [(0.0, 0.6, 1.1), (1.5, 0.6, 1.1), (3.0, 0.9, 2.8), (0.5, 0.3, 0.2)])
    def test_bilinear(self, gamma, r, theta):
        b = 0.5 * gamma + 1.0
        xi = 1.0 - cmath.exp(1j * theta)
        series = bilinear_hypergeometric_series(b, b, gamma + 1.0, xi, xi.conjugate(), r)
        closed = bilinear_hypergeometric_closed(b, b, gamma + 1.0, xi, xi.conjugate(), r)
        assert abs(series.value - closed) <= 1e-12 * abs(closed)
        assert series.tail_bound <= 1e-15

    @pytest.mark.parametrize("t,u,theta", [(0.4, 2.0, 0.8), (0.05, 0.1, 2.5), (0.8, 4.0, 3.0)])
    def test_bilateral(self, t, u, theta):
        nu = 1.5
        c = 0.5 * nu + 1.0
        y = 1.0 - cmath.exp(1j * theta)
        series = bilateral_laguerre_series(t, c, nu, y, u)
        closed = bilateral_laguerre_closed(t, c, nu, y, u)
        assert abs(series.value - closed) <= 1e-11 * max(1.0, abs(closed))

    def test_bilinear_domain(self):
        with pytest.raises(DomainError):
            bilinear_hypergeometric_series(3.0, 1.0, 2.0, 0.5, 0.5, 0.5)
        with pytest.raises(DomainError):
            bilinear_hypergeometric_series(1.0, 1.0, 2.0, 0.5, 0.5, 1.0)
