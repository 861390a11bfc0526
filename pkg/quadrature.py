"""
Quadrature rules for the circle and the half-line.

Rules are immutable QuadratureRule records (see infrastructure.py). Circle rules
either use the uniform periodic trapezoid or fold the weight |sin(theta/2)|^gamma
into Gauss-Jacobi weights; half-line rules are tanh-sinh maps of [0, L].
"""

import math
import logging
from typing import Callable, Union

import numpy as np
from scipy.special import roots_jacobi

from infrastructure import DomainError, QuadratureRule, settings

log = logging.getLogger("gpcs.quadrature")

# tanh-sinh window; keeps the end nodes distinct in double precision
TANH_SINH_T_MAX = 3.0


def circle_rule(n_nodes: int) -> QuadratureRule:
    """Periodic trapezoid on [0, 2 pi); exact for e^{ik theta} with |k| < n_nodes."""
    if n_nodes < 4:
        raise DomainError(f"circle rule needs at least 4 nodes, got {n_nodes}")
    nodes = 2.0 * math.pi * np.arange(n_nodes) / n_nodes
    weights = np.full(n_nodes, 2.0 * math.pi / n_nodes)
    return QuadratureRule(domain="circle", nodes=nodes, weights=weights, order_hint=n_nodes - 1)


def circle_jacobi_rule(n_nodes: int, gamma: float) -> QuadratureRule:
    """
    Gauss-Jacobi rule for int_0^{2pi} |sin(theta/2)|^gamma f(theta) d theta.

    theta = pi (1 + s) turns sin(theta/2) into cos(pi s / 2), and
    cos(pi s/2) = (1 - s^2) h(s) with h smooth, so the Jacobi(gamma, gamma)
    weight absorbs the endpoint singularity of fractional gamma. The weight is
    folded into the returned weights (weight_exponent = gamma).
    """
    if n_nodes < 4:
        raise DomainError(f"circle rule needs at least 4 nodes, got {n_nodes}")
    if gamma < 0.0:
        raise DomainError(f"gamma must be >= 0, got {gamma}")
    s, w = roots_jacobi(n_nodes, gamma, gamma)
    h = np.cos(0.5 * math.pi * s) / (1.0 - s * s)
    weights = math.pi * w * h ** gamma
    return QuadratureRule(
        domain="circle",
        nodes=math.pi * (1.0 + s),
        weights=weights,
        order_hint=2 * n_nodes - 1,
        weight_exponent=gamma,
    )


def half_line_rule(n_nodes: int, scale: float = 1.0, span: float = None) -> QuadratureRule:
    """
    Tanh-sinh rule on [0, L], L = span * scale, with x = L / (1 + exp(-2q)),
    q = (pi/2) sinh t. Integrands are expected to decay like exp(-x^2/(2 scale^2)).
    """
    if n_nodes < 8:
        raise DomainError(f"half-line rule needs at least 8 nodes, got {n_nodes}")
    if not scale > 0.0:
        raise DomainError(f"scale must be > 0, got {scale}")
    span = settings.HALF_LINE_SPAN if span is None else span
    length = span * scale
    t = np.linspace(-TANH_SINH_T_MAX, TANH_SINH_T_MAX, n_nodes)
    h = t[1] - t[0]
    q = 0.5 * math.pi * np.sinh(t)
    nodes = length / (1.0 + np.exp(-2.0 * q))
    weights = h * length * 0.5 * math.pi * np.cosh(t) / (2.0 * np.cosh(q) ** 2)
    return QuadratureRule(
        domain="half_line", nodes=nodes, weights=weights, order_hint=n_nodes, scale=scale,
    )


def integrate(rule: QuadratureRule, f: Union[Callable[[np.ndarray], np.ndarray], np.ndarray]) -> complex:
    """
    Sum w_i f(x_i) with exactly rounded summation.

    `f` is a vectorized callable or the array of samples at rule.nodes. A
    non-finite sample raises DomainError naming the node.
    """
    values = f(rule.nodes) if callable(f) else f
    values = np.asarray(values)
    if values.shape != rule.nodes.shape:
        raise DomainError(f"integrand has shape {values.shape}, rule has {rule.nodes.shape}")
    bad = ~np.isfinite(values)
    if np.any(bad):
        idx = int(np.argmax(bad))
        raise DomainError(f"integrand is not finite at node {idx} (x={rule.nodes[idx]!r})")
    prod = rule.weights * values
    return complex(math.fsum(np.real(prod)), math.fsum(np.imag(prod)))


def tail_mass(rule: QuadratureRule, values: np.ndarray, fraction: float = 0.1) -> float:
    """
    Share of sum |w f| carried by nodes in the outer `fraction` of the span.

    Tanh-sinh weights vanish at the cut-off, so the window is set by position,
    not by node count. Large values mean the window is too short.
    """
    mags = rule.weights * np.abs(np.asarray(values))
    total = float(np.sum(mags))
    if total == 0.0:
        return 0.0
    outer = rule.nodes >= (1.0 - fraction) * rule.nodes[-1]
    return float(np.sum(mags[outer])) / total


__all__ = ["circle_rule", "circle_jacobi_rule", "half_line_rule", "integrate", "tail_mass", "TANH_SINH_T_MAX"]
