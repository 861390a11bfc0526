"""
Circular Jacobi polynomials on the unit circle.

    g_n^gamma(e^{i theta}) = (gamma+1)_n / n! * 2F1(-n, gamma/2+1; gamma+1; 1 - e^{i theta})

In powers of u = e^{i theta} the coefficients are (gamma/2)_{n-k}/(n-k)! *
(gamma/2+1)_k/k!, all nonnegative, so evaluation never cancels. The polynomials
are orthogonal against

    Omega_gamma(theta) = 2^gamma G(gamma/2+1)^2 / G(gamma+1) * sin(theta/2)^gamma / (2 pi)

with squared norms (gamma+1)_n / n!.
"""

import math
import logging
from typing import Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator
from scipy.special import gammaln

from infrastructure import DomainError, QuadratureRule, settings
from quadrature import circle_jacobi_rule
from special_functions import jacobi_recurrence, rising_over_factorial

log = logging.getLogger("gpcs.cjacobi")

TWO_PI = 2.0 * math.pi


class CirclePoint(BaseModel):
    """A point e^{i theta} of the unit circle; theta is stored reduced to [0, 2 pi)."""
    model_config = ConfigDict(frozen=True)

    theta: float

    @field_validator("theta")
    @classmethod
    def _reduce(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError(f"theta must be finite, got {v}")
        return math.fmod(v, TWO_PI) % TWO_PI


ThetaLike = Union[float, np.ndarray, CirclePoint]


def _theta(p: ThetaLike):
    if isinstance(p, CirclePoint):
        return p.theta
    return p


def _check_gamma(gamma: float) -> None:
    if not gamma >= 0.0:
        raise DomainError(f"gamma must be >= 0, got {gamma}")


def coefficient_vector(n: int, gamma: float) -> np.ndarray:
    """Coefficients of g_n^gamma in powers of e^{i theta}, lowest first."""
    if n < 0:
        raise DomainError(f"degree must be >= 0, got {n}")
    _check_gamma(gamma)
    left = rising_over_factorial(0.5 * gamma, n)
    right = rising_over_factorial(0.5 * gamma + 1.0, n)
    return left[::-1] * right


def circular_jacobi(n: int, gamma: float, p: ThetaLike) -> Union[complex, np.ndarray]:
    """g_n^gamma(e^{i theta}) at one angle or an array of angles."""
    theta = np.asarray(_theta(p), dtype=float)
    coeffs = coefficient_vector(n, gamma)
    k = np.arange(n + 1)
    values = np.exp(1j * np.multiply.outer(theta, k)) @ coeffs
    return complex(values) if values.ndim == 0 else values


def circular_jacobi_sequence(n_max: int, gamma: float, theta: float) -> np.ndarray:
    """g_0 .. g_{n_max} at one angle, by the three-term recurrence in n."""
    _check_gamma(gamma)
    return jacobi_recurrence(n_max, 0.5 * gamma + 1.0, gamma + 1.0, np.exp(1j * _theta(theta)))


def squared_norm(n: int, gamma: float) -> float:
    """Gamma(n+gamma+1) / (n! Gamma(gamma+1)) = (gamma+1)_n / n!."""
    _check_gamma(gamma)
    return math.exp(gammaln(n + gamma + 1.0) - gammaln(n + 1.0) - gammaln(gamma + 1.0))


def normalized_circular_jacobi(n: int, gamma: float, p: ThetaLike) -> Union[complex, np.ndarray]:
    """sqrt(n!/(gamma+1)_n) g_n^gamma, unit norm against Omega_gamma."""
    return circular_jacobi(n, gamma, p) / math.sqrt(squared_norm(n, gamma))


def weight_constant(gamma: float) -> float:
    """2^gamma G(gamma/2+1)^2 / (G(gamma+1) 2 pi)."""
    _check_gamma(gamma)
    return math.exp(gamma * math.log(2.0) + 2.0 * gammaln(0.5 * gamma + 1.0) - gammaln(gamma + 1.0)) / TWO_PI


def weight_density(gamma: float, p: ThetaLike) -> Union[float, np.ndarray]:
    """Omega_gamma(theta) with respect to d theta; integrates to 1 over the circle."""
    theta = np.asarray(_theta(p), dtype=float)
    values = weight_constant(gamma) * np.abs(np.sin(0.5 * theta)) ** gamma
    return float(values) if values.ndim == 0 else values


def weighted_integral(gamma: float, rule: QuadratureRule, values: np.ndarray) -> Union[complex, np.ndarray]:
    """
    Integral of f Omega_gamma d theta from samples at rule.nodes (last axis).

    Gauss-Jacobi rules already carry sin^gamma; uniform rules get the density applied.
    """
    if rule.domain != "circle":
        raise DomainError("weighted_integral needs a circle rule")
    values = np.asarray(values)
    if math.isclose(rule.weight_exponent, gamma, rel_tol=0.0, abs_tol=1e-14):
        w = weight_constant(gamma) * rule.weights
    elif rule.weight_exponent == 0.0:
        w = rule.weights * weight_density(gamma, rule.nodes)
    else:
        raise DomainError(f"rule carries sin^{rule.weight_exponent}, cannot integrate against gamma={gamma}")
    return values @ w


def default_circle_rule(gamma: float, n_nodes: Optional[int] = None) -> QuadratureRule:
    return circle_jacobi_rule(n_nodes or settings.CIRCLE_NODES, gamma)


def gram_matrix(n_max: int, gamma: float, rule: Optional[QuadratureRule] = None) -> np.ndarray:
    """
    Entries int conj(g_n) g_m Omega_gamma d theta for n, m <= n_max.

    Expected: diagonal (gamma+1)_n / n!, zero elsewhere.
    """
    _check_gamma(gamma)
    rule = rule or default_circle_rule(gamma)
    if rule.domain != "circle":
        raise DomainError("gram_matrix needs a circle rule")
    if rule.order_hint < 2 * n_max:
        raise DomainError(f"rule exact to order {rule.order_hint} cannot resolve degree {2 * n_max}")
    if rule.weight_exponent == 0.0 and gamma > 0.0 and not float(gamma / 2.0).is_integer():
        # sin^gamma has a derivative singularity at theta = 0 for these gamma
        log.warning(f"uniform circle rule with gamma={gamma}: expect algebraic convergence; use circle_jacobi_rule")
    vand = np.stack([circular_jacobi(n, gamma, rule.nodes) for n in range(n_max + 1)])
    return weighted_integral(gamma, rule, vand.conj()[:, None, :] * vand[None, :, :])


def london_phase_state(theta: float, n_max: int) -> np.ndarray:
    """Unnormalizable phase-state coefficients e^{i n theta}, n = 0..n_max."""
    if n_max < 0:
        raise DomainError(f"n_max must be >= 0, got {n_max}")
    return np.exp(1j * np.arange(n_max + 1) * _theta(theta))


__all__ = [
    "CirclePoint", "coefficient_vector", "circular_jacobi", "circular_jacobi_sequence", "squared_norm",
    "normalized_circular_jacobi", "weight_constant", "weight_density", "weighted_integral",
    "default_circle_rule", "gram_matrix", "london_phase_state",
]
