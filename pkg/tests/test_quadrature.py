import math

import numpy as np
import pytest
from scipy.special import gamma as gamma_fn

from infrastructure import DomainError
from quadrature import circle_jacobi_rule, circle_rule, half_line_rule, integrate, tail_mass


def test_trapezoid_exact_for_trig_polynomials():
    rule = circle_rule(16)
    assert integrate(rule, np.ones_like).real == pytest.approx(2.0 * math.pi, rel=1e-15)
    assert abs(integrate(rule, lambda t: np.cos(3 * t) + 1j * np.sin(5 * t))) < 1e-14
    with pytest.raises(DomainError):
        circle_rule(3)


@pytest.mark.parametrize("gamma", [0.5, 1.5, 3.0])
def test_circle_jacobi_rule_absorbs_weight(gamma):
    rule = circle_jacobi_rule(64, gamma)
    assert rule.weight_exponent == gamma
    # int_0^{2pi} |sin(theta/2)|^gamma d theta
    exact = 2.0 * math.sqrt(math.pi) * gamma_fn(0.5 * gamma + 0.5) / gamma_fn(0.5 * gamma + 1.0)
    assert integrate(rule, np.ones_like).real == pytest.approx(exact, rel=1e-13)
    assert rule.nodes[0] > 0.0 and rule.nodes[-1] < 2.0 * math.pi


def test_circle_jacobi_rule_domain():
    with pytest.raises(DomainError):
        circle_jacobi_rule(64, -0.5)


def test_half_line_gaussian_moments(half_line):
    assert integrate(half_line, lambda x: np.exp(-x * x)).real == pytest.approx(0.5 * math.sqrt(math.pi), rel=1e-13)
    assert integrate(half_line, lambda x: x ** 3.5 * np.exp(-x * x)).real == pytest.approx(0.5 * gamma_fn(2.25), rel=1e-12)
    assert np.all(np.diff(half_line.nodes) > 0.0)
    assert half_line.nodes[0] > 0.0


def test_half_line_scale():
    rule = half_line_rule(801, scale=2.0)
    assert rule.nodes[-1] < 24.0
    assert integrate(rule, lambda x: np.exp(-x * x / 4.0)).real == pytest.approx(math.sqrt(math.pi), rel=1e-13)


def test_half_line_rule_domain():
    with pytest.raises(DomainError):
        half_line_rule(4)
    with pytest.raises(DomainError):
        half_line_rule(101, scale=0.0)


def test_integrate_rejects_bad_samples(coarse_half_line):
    values = np.exp(-coarse_half_line.nodes)
    values[10] = np.inf
    with pytest.raises(DomainError, match="node 10"):
        integrate(coarse_half_line, values)
    with pytest.raises(DomainError):
        integrate(coarse_half_line, np.ones(3))


def test_tail_mass_flags_truncated_integrands(coarse_half_line):
    assert tail_mass(coarse_half_line, np.exp(-coarse_half_line.nodes ** 2)) < 1e-30
    assert tail_mass(coarse_half_line, np.ones(coarse_half_line.size)) == pytest.approx(0.1, abs=0.01)
    assert tail_mass(coarse_half_line, np.zeros(coarse_half_line.size)) == 0.0
