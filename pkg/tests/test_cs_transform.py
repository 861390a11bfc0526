import cmath
import math

import numpy as np
import pytest

from infrastructure import DomainError, GridFunction
from circular_jacobi import normalized_circular_jacobi
from cs_transform import (
    default_transform_rule,
    kappa,
    kappa_identities,
    laguerre_confluent_integral,
    neville_at_zero,
    q_epsilon_analytic,
    q_epsilon_quadrature,
    q_epsilon_quadrature_all,
    transform_eigenstate,
    transform_function,
)
from pho_basis import eigenfunctions
from quadrature import circle_rule

GRID = np.linspace(0.0, 2.0 * math.pi, 7, endpoint=False)


@pytest.fixture(scope="module")
def rule():
    return default_transform_rule()


def test_kappa_identities(rng):
    for tau, theta, gamma in zip(rng.uniform(0.05, 0.95, 50), rng.uniform(0.0, 2 * math.pi, 50), rng.uniform(0.0, 3.0, 50)):
        defect_a, defect_b = kappa_identities(tau, theta, gamma)
        assert defect_a < 1e-12 * max(1.0, abs(kappa(tau, theta)))
        assert defect_b < 1e-12


def test_kappa_domain():
    assert kappa(0.5, 0.0) == 0.0
    with pytest.raises(DomainError):
        kappa(1.0, 1.0)


class TestEigenImages:
    @pytest.mark.parametrize("gamma", [0.5, 1.5, 3.0])
    def test_limit_is_normalized_jacobi(self, gamma):
        for n in range(8):
            expected = normalized_circular_jacobi(n, gamma, GRID)
            values = np.array([q_epsilon_analytic(n, gamma, 0.0, t) for t in GRID])
            np.testing.assert_allclose(values, expected, rtol=1e-12, atol=1e-13)

    def test_gamma_zero_gives_fourier_modes(self):
        for n in range(6):
            values = np.array([q_epsilon_analytic(n, 0.0, 0.0, t) for t in GRID])
            np.testing.assert_allclose(values, np.exp(1j * n * GRID), atol=1e-13)

    def test_decay_law(self):
        base = q_epsilon_analytic(4, 1.5, 0.0, 1.0)
        assert q_epsilon_analytic(4, 1.5, 0.3, 1.0) == pytest.approx(math.exp(-0.6) * base, rel=1e-13)

    def test_transform_eigenstate(self):
        result = transform_eigenstate(0, 1.5, GRID)
        assert result.route == "analytic"
        np.testing.assert_allclose(result.values, np.ones(GRID.size))

    @pytest.mark.parametrize("gamma,eps,theta", [(0.5, 0.5, 0.5), (1.5, 0.5, math.pi / 2), (1.5, 0.1, math.pi), (3.0, 0.2, 5.0)])
    def test_quadrature_matches_closed_value(self, rule, gamma, eps, theta):
        values = q_epsilon_quadrature_all(6, gamma, eps, theta, rule)
        for n in range(7):
            ref = q_epsilon_analytic(n, gamma, eps, theta)
            assert abs(values[n] - ref) <= 1e-8 * (1.0 + abs(ref))
        assert q_epsilon_quadrature(2, gamma, eps, theta, rule) == pytest.approx(values[2], rel=1e-13)

    def test_quadrature_floor(self, rule):
        with pytest.raises(DomainError):
            q_epsilon_quadrature(1, 1.5, 0.01, 1.0, rule)

    def test_domain(self):
        with pytest.raises(DomainError):
            q_epsilon_analytic(-1, 1.5, 0.0, 1.0)
        with pytest.raises(DomainError):
            q_epsilon_analytic(1, 1.5, -0.1, 1.0)
        with pytest.raises(DomainError):
            q_epsilon_analytic(1, -1.5, 0.1, 1.0)


def test_neville_is_exact_for_polynomials():
    s = [0.4, 0.2, 0.1, 0.05]
    values = np.array([1.0 + 2.0 * v - (3.0 + 0.5j) * v ** 2 for v in s])
    best, previous = neville_at_zero(s, values)
    assert abs(best - 1.0) < 1e-13
    assert abs(previous - 1.0) < 1e-12


class TestFunctionTransform:
    @pytest.mark.parametrize("gamma,n", [(0.5, 1), (1.5, 2)])
    def test_extrapolated_eigenstate(self, rule, gamma, n):
        phi = GridFunction.from_callable(lambda x: eigenfunctions(n, gamma + 1.0, x, strict=False)[n], rule)
        result = transform_function(phi, gamma, GRID[:4], route="quadrature+extrapolation")
        assert result.route == "quadrature+extrapolation"
        np.testing.assert_allclose(result.values, normalized_circular_jacobi(n, gamma, GRID[:4]), atol=1e-6)
        assert result.error_estimate < 1e-6

    def test_projection_uses_conjugate(self, rule):
        gamma = 1.5
        phi = GridFunction.from_callable(lambda x: 1j * eigenfunctions(1, gamma + 1.0, x, strict=False)[1], rule)
        result = transform_function(phi, gamma, GRID, route="projection")
        assert result.route == "projection"
        np.testing.assert_allclose(result.values, -1j * normalized_circular_jacobi(1, gamma, GRID), atol=1e-9)

    def test_rejects_circle_functions(self):
        phi = GridFunction.from_callable(np.cos, circle_rule(16))
        with pytest.raises(DomainError):
            transform_function(phi, 1.5, GRID)

    def test_schedule_respects_kernel_floor(self, rule):
        phi = GridFunction.from_callable(lambda x: eigenfunctions(0, 2.5, x)[0], rule)
        with pytest.raises(DomainError):
            transform_function(phi, 1.5, GRID[:2], eps_schedule=[0.2, 0.01])


class TestLaguerreIntegral:
    @pytest.mark.parametrize("gamma,eps,theta", [(0.5, 0.2, 0.7), (1.5, 0.5, 2.5)])
    def test_routes_agree(self, rule, gamma, eps, theta):
        for n in range(4):
            closed = laguerre_confluent_integral(n, gamma, eps, theta)
            quad = laguerre_confluent_integral(n, gamma, eps, theta, route="quadrature", rule=rule)
            assert abs(quad - closed) <= 1e-8 * abs(closed)

    def test_theta_zero(self):
        # kappa = 0 leaves int x^{2g+1} e^{-x^2/(1-tau)} L_n(x^2) dx
        gamma, eps = 1.5, 0.5
        tau = math.exp(-0.25)
        value = laguerre_confluent_integral(0, gamma, eps, 0.0)
        assert value == pytest.approx(0.5 * math.gamma(gamma + 1.0) * (1.0 - tau) ** (gamma + 1.0), rel=1e-13)

    def test_unknown_route(self):
        with pytest.raises(DomainError):
            laguerre_confluent_integral(1, 1.5, 0.5, 1.0, route="series")
