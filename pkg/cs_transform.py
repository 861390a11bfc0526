"""
Coherent-state transform W_gamma from the half-line to the circle.

    W_gamma[phi](e^{i theta}) = lim_{eps -> 0+} int_0^inf sqrt(N) <x|theta; eps, gamma, gamma+1> conj(phi(x)) dx

For the eigenstates the eps-regularized integral is known in closed form,

    Q_n(eps, theta) = e^{-n eps/2} ((gamma+1)_n/n!)^{1/2} 2F1(-n, 1+gamma/2; 1+gamma; 1-e^{i theta}),

so images of |n; gamma+1> are the normalized circular Jacobi polynomials.
General functions go through quadrature at a geometric eps schedule followed by
polynomial extrapolation in s = 1 - e^{-eps/2}; every eigen-mode is a polynomial
(1-s)^n in that variable.
"""

import cmath
import math
import logging
from typing import List, Literal, Optional, Sequence, Tuple

import numpy as np
from scipy.special import gammaln

from infrastructure import DomainError, GridFunction, QuadratureRule, TransformResult, settings
from circular_jacobi import normalized_circular_jacobi
from phase_states import closed_state_unnormalized
from pho_basis import eigenfunctions
from quadrature import half_line_rule, integrate, tail_mass
from special_functions import hyp1f1_scaled, hyp2f1_terminating, laguerre_table

log = logging.getLogger("gpcs.transform")

TransformRoute = Literal["auto", "quadrature+extrapolation", "projection"]


def _one_minus_u(theta: float) -> complex:
    """1 - e^{i theta} without cancellation near theta = 0."""
    return complex(2.0 * math.sin(0.5 * theta) ** 2, -math.sin(theta))


def _check_tau(tau: float) -> None:
    if not (0.0 < tau < 1.0):
        raise DomainError(f"tau must lie in (0, 1), got {tau}")

# ==================== KAPPA ====================

def kappa(tau: float, theta: float) -> complex:
    """(1 - e^{i theta}) tau / ((1 - tau)(1 - tau e^{i theta}))."""
    _check_tau(tau)
    omt = 1.0 - tau
    return _one_minus_u(theta) * tau / (omt * (omt + tau * _one_minus_u(theta)))


def kappa_identities(tau: float, theta: float, gamma: float) -> Tuple[float, float]:
    """
    Defects of the two algebraic identities behind the Laplace-type integral:

        kappa (1-tau)^2 / (tau (1 - kappa (1-tau))) = 1 - e^{i theta}
        (1-tau)^{gamma/2+1} / ((1 - tau e^{i theta})(1 - kappa (1-tau)))^{1+gamma/2} = 1
    """
    k = kappa(tau, theta)
    omt = 1.0 - tau
    rest = 1.0 - k * omt
    defect_a = abs(k * omt * omt / (tau * rest) - _one_minus_u(theta))
    product = (1.0 - tau * cmath.exp(1j * theta)) * rest
    defect_b = abs(omt ** (0.5 * gamma + 1.0) / product ** (1.0 + 0.5 * gamma) - 1.0)
    return defect_a, defect_b

# ==================== EIGENSTATE IMAGES ====================

def q_epsilon_analytic(n: int, gamma: float, epsilon: float, theta: float) -> complex:
    """e^{-n eps/2} ((gamma+1)_n/n!)^{1/2} 2F1(-n, 1+gamma/2; 1+gamma; 1-e^{i theta}); eps = 0 gives the limit."""
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    if not gamma >= 0.0:
        raise DomainError(f"gamma must be >= 0, got {gamma}")
    if epsilon < 0.0:
        raise DomainError(f"epsilon must be >= 0, got {epsilon}")
    log_scale = -0.5 * n * epsilon + 0.5 * float(gammaln(gamma + 1.0 + n) - gammaln(gamma + 1.0) - gammaln(n + 1.0))
    return math.exp(log_scale) * hyp2f1_terminating(n, 1.0 + 0.5 * gamma, 1.0 + gamma, _one_minus_u(theta))


def _kernel_on_rule(gamma: float, epsilon: float, theta: float, rule: QuadratureRule) -> np.ndarray:
    settings.check_epsilon(epsilon, "kernel")
    return np.asarray(closed_state_unnormalized(gamma, epsilon, theta, rule.nodes))


def default_transform_rule() -> QuadratureRule:
    return half_line_rule(settings.HALF_LINE_NODES, scale=math.sqrt(2.0))


def q_epsilon_quadrature_all(
    n_max: int, gamma: float, epsilon: float, theta: float, rule: Optional[QuadratureRule] = None,
) -> np.ndarray:
    """Q_0..Q_{n_max} by half-line quadrature of sqrt(N) <x|theta> <x|n; gamma+1>."""
    rule = rule or default_transform_rule()
    kernel = _kernel_on_rule(gamma, epsilon, theta, rule)
    basis = eigenfunctions(n_max, gamma + 1.0, rule.nodes, strict=False)
    # the highest mode reaches furthest out
    if tail_mass(rule, kernel * basis[-1]) > 1e-12:
        log.warning(f"transform integrand not decayed at x={rule.nodes[-1]:.3g} (eps={epsilon}, theta={theta})")
    return np.array([integrate(rule, kernel * b) for b in basis])


def q_epsilon_quadrature(n: int, gamma: float, epsilon: float, theta: float, rule: Optional[QuadratureRule] = None) -> complex:
    """Single mode of q_epsilon_quadrature_all; needs eps >= the kernel floor."""
    return complex(q_epsilon_quadrature_all(n, gamma, epsilon, theta, rule)[n])


def transform_eigenstate(n: int, gamma: float, theta_grid: Sequence[float]) -> TransformResult:
    """Image of |n; gamma+1>: sqrt(n!/(gamma+1)_n) g_n^gamma on the grid."""
    grid = np.asarray(theta_grid, dtype=float)
    values = normalized_circular_jacobi(n, gamma, grid)
    return TransformResult(n=n, gamma=gamma, theta_grid=grid, values=np.atleast_1d(values), route="analytic")

# ==================== GENERAL FUNCTIONS ====================

def neville_at_zero(s: Sequence[float], values: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Interpolating polynomial through (s_k, values[k]) evaluated at 0, along axis 0.

    Returns the estimate from all points and the one without the first point.
    """
    s = np.asarray(s, dtype=float)
    table = [np.asarray(v, dtype=complex) for v in values]
    previous = table[-1]
    k = len(table)
    for level in range(1, k):
        for i in range(k - level):
            j = i + level
            table[i] = (s[j] * table[i] - s[i] * table[i + 1]) / (s[j] - s[i])
        if level == k - 2:
            previous = table[1]
    return table[0], previous


def _projection_image(phi: GridFunction, gamma: float, grid: np.ndarray, n_max: int) -> Tuple[np.ndarray, float]:
    basis = eigenfunctions(n_max, gamma + 1.0, phi.nodes, strict=False)
    proj = basis @ (phi.rule.weights * phi.values)
    images = np.stack([np.atleast_1d(normalized_circular_jacobi(n, gamma, grid)) for n in range(n_max + 1)])
    captured = float(np.sum(np.abs(proj) ** 2))
    norm2 = phi.l2_norm() ** 2
    return np.conj(proj) @ images, (captured / norm2 if norm2 > 0 else 1.0)


def transform_function(
    phi: GridFunction,
    gamma: float,
    theta_grid: Sequence[float],
    eps_schedule: Optional[Sequence[float]] = None,
    route: TransformRoute = "auto",
    n_max: int = 64,
    tol: Optional[float] = None,
) -> TransformResult:
    """
    W_gamma[phi] on a theta grid.

    route="auto" runs quadrature + extrapolation and falls back to projection onto
    n_max eigenstates (flagged in the result) when the extrapolation error
    estimate exceeds tol.
    """
    if phi.domain != "half_line":
        raise DomainError("transform needs a half-line grid function")
    if not gamma >= 0.0:
        raise DomainError(f"gamma must be >= 0, got {gamma}")
    grid = np.atleast_1d(np.asarray(theta_grid, dtype=float))
    notes: List[str] = []

    if route == "projection":
        values, kept = _projection_image(phi, gamma, grid, n_max)
        if kept < 0.999:
            notes.append(f"projection keeps {kept:.4f} of the norm")
        return TransformResult(gamma=gamma, theta_grid=grid, values=values, route="projection", warnings=notes)

    schedule = [float(e) for e in (eps_schedule or settings.RICHARDSON_SCHEDULE)]
    for e in schedule:
        settings.check_epsilon(e, "kernel")
    s = [-math.expm1(-0.5 * e) for e in schedule]
    conj_phi = np.conj(phi.values)
    samples = np.empty((len(schedule), grid.size), dtype=complex)
    for k, e in enumerate(schedule):
        for j, t in enumerate(grid):
            kernel = _kernel_on_rule(gamma, e, t, phi.rule)
            samples[k, j] = integrate(phi.rule, kernel * conj_phi)
    best, previous = neville_at_zero(s, samples)
    error = float(np.max(np.abs(best - previous)))
    tol = tol if tol is not None else 1e-6 * max(1.0, float(np.max(np.abs(best))))

    if error > tol:
        msg = f"extrapolation unstable: successive estimates differ by {error:.2e} > {tol:.1e}"
        log.warning(msg)
        notes.append(msg)
        if route == "auto":
            values, kept = _projection_image(phi, gamma, grid, n_max)
            notes.append(f"fell back to projection onto {n_max + 1} eigenstates (norm kept {kept:.4f})")
            return TransformResult(
                gamma=gamma, theta_grid=grid, values=values, route="projection",
                tolerance=tol, error_estimate=error, warnings=notes,
            )
    return TransformResult(
        gamma=gamma, theta_grid=grid, values=best, route="quadrature+extrapolation",
        tolerance=tol, error_estimate=error, warnings=notes,
    )

# ==================== LAPLACE-TYPE INTEGRAL ====================

def laguerre_confluent_integral(
    n: int, gamma: float, epsilon: float, theta: float,
    route: Literal["closed", "quadrature"] = "closed", rule: Optional[QuadratureRule] = None,
) -> complex:
    """
    int_0^inf x^{2 gamma+1} e^{-x^2/(1-tau)} L_n^{(gamma)}(x^2) 1F1(1+gamma/2; 1+gamma; kappa x^2) dx,
    tau = e^{-eps/2}, against its closed value

        (gamma+1)_n G(gamma+1) tau^n (1-tau)^{gamma+1} / (2 n! (1 - kappa(1-tau))^{1+gamma/2})
            2F1(-n, 1+gamma/2; 1+gamma; 1-e^{i theta}).
    """
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    if not gamma >= 0.0:
        raise DomainError(f"gamma must be >= 0, got {gamma}")
    tau = math.exp(-0.5 * epsilon)
    _check_tau(tau)
    omt = -math.expm1(-0.5 * epsilon)
    w = _one_minus_u(theta)
    one_minus_tau_u = omt + tau * w

    if route == "closed":
        log_mag = (
            float(gammaln(gamma + 1.0 + n) - gammaln(n + 1.0)) + n * math.log(tau) + (gamma + 1.0) * math.log(omt)
        )
        # 1 - kappa(1-tau) = (1-tau)/(1 - tau e^{i theta})
        rest = omt / one_minus_tau_u
        hyp = hyp2f1_terminating(n, 1.0 + 0.5 * gamma, 1.0 + gamma, w)
        return 0.5 * math.exp(log_mag) * cmath.exp(-(1.0 + 0.5 * gamma) * cmath.log(rest)) * hyp
    if route != "quadrature":
        raise DomainError(f"Unknown integral route: {route}")

    settings.check_epsilon(epsilon, "kernel")
    rule = rule or default_transform_rule()
    x = rule.nodes
    x2 = x * x
    d2 = abs(one_minus_tau_u) ** 2
    k = w * tau / (omt * one_minus_tau_u)
    # Re(-x^2/(1-tau) + kappa x^2) = -x^2 (1 - tau + 2 tau sin^2(theta/2)) / |1 - tau e^{i theta}|^2
    decay = (omt + 2.0 * tau * math.sin(0.5 * theta) ** 2) / d2
    scaled = np.array([hyp1f1_scaled(1.0 + 0.5 * gamma, 1.0 + gamma, k * v).value for v in x2])
    lag = laguerre_table(n, gamma, x2)[n]
    with np.errstate(divide="ignore"):
        log_env = (2.0 * gamma + 1.0) * np.log(x) - decay * x2
    values = np.exp(log_env + 1j * k.imag * x2) * lag * scaled
    return integrate(rule, values)


__all__ = [
    "kappa", "kappa_identities", "q_epsilon_analytic", "default_transform_rule", "q_epsilon_quadrature_all",
    "q_epsilon_quadrature", "transform_eigenstate", "neville_at_zero", "transform_function",
    "laguerre_confluent_integral",
]
