"""
Pseudoharmonic oscillator: parameters, spectrum and orthonormal eigenbasis.

H = -d^2/dx^2 + x^2 + a/x^2 on the half-line with Dirichlet condition at 0.
alpha = 1 + sqrt(1 + 4a)/2, lambda_n = 2(2n + alpha) and

    <x|n;alpha> = (2 n!/G(alpha+n))^{1/2} x^{alpha-1/2} e^{-x^2/2} L_n^{(alpha-1)}(x^2).
"""

import math
import logging
from typing import Union

import numpy as np
from scipy.special import gammaln

from infrastructure import DomainError, ModelParams, MolecularParams, QuadratureRule, RangeOverflowError

log = logging.getLogger("gpcs.pho")

ArrayLike = Union[float, np.ndarray]

_RESCALE = 1e150

# ==================== PARAMETERS ====================

def alpha_from_a(a: float) -> float:
    return 1.0 + 0.5 * math.sqrt(1.0 + 4.0 * a)


def a_from_alpha(alpha: float) -> float:
    """Inverse of alpha(a): a = (alpha-1)^2 - 1/4."""
    return (alpha - 1.0) ** 2 - 0.25


def params_from_a(a: float, epsilon: float) -> ModelParams:
    """Build uncoupled parameters from the coupling a; gamma stays unset."""
    if not a > 0.0:
        raise DomainError(f"a must be > 0, got {a}")
    if not epsilon > 0.0:
        raise DomainError(f"epsilon must be > 0, got {epsilon}")
    alpha = alpha_from_a(a)
    if not alpha > 1.5:
        raise DomainError(f"a={a} gives alpha={alpha}, which must exceed 3/2")
    return ModelParams(a=a, alpha=alpha, epsilon=epsilon)


def params_from_alpha(alpha: float, epsilon: float) -> ModelParams:
    if not alpha > 1.5:
        raise DomainError(f"alpha must exceed 3/2, got {alpha}")
    if not epsilon > 0.0:
        raise DomainError(f"epsilon must be > 0, got {epsilon}")
    return ModelParams(a=a_from_alpha(alpha), alpha=alpha, epsilon=epsilon)


def molecular_to_a(m: MolecularParams) -> float:
    """a = rho * kappa0^2."""
    return m.rho * m.kappa0 ** 2


def params_from_molecular(m: MolecularParams, epsilon: float) -> ModelParams:
    return params_from_a(molecular_to_a(m), epsilon)


def couple_gamma(p: ModelParams) -> ModelParams:
    """Lock gamma = alpha - 1 (idempotent)."""
    return ModelParams(**{**p.model_dump(), "gamma": p.alpha - 1.0, "coupled": True})


def set_gamma(p: ModelParams, gamma: float) -> ModelParams:
    """Attach an independent circular-Jacobi charge (uncoupled)."""
    if not gamma >= 0.0:
        raise DomainError(f"gamma must be >= 0, got {gamma}")
    return ModelParams(**{**p.model_dump(), "gamma": gamma, "coupled": False})


def with_epsilon(p: ModelParams, epsilon: float) -> ModelParams:
    if not epsilon > 0.0:
        raise DomainError(f"epsilon must be > 0, got {epsilon}")
    return ModelParams(**{**p.model_dump(), "epsilon": epsilon})

# ==================== SPECTRUM ====================

def eigenvalue(n: int, alpha: float) -> float:
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    if not alpha > 1.5:
        raise DomainError(f"alpha must exceed 3/2, got {alpha}")
    return 2.0 * (2 * n + alpha)


def eigenvalue_molecular(n: int, m: MolecularParams) -> float:
    """
    Spectrum of -d^2/dx^2 + rho (x/k0 - k0/x)^2.

    The potential expands to rho x^2/k0^2 - 2 rho + rho k0^2/x^2, so this equals the
    rescaled PHO spectrum shifted by -2 rho.
    """
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    s = math.sqrt(m.rho)
    k0 = m.kappa0
    return 4.0 / k0 * s * (n + 0.5 + 0.25 * (math.sqrt(1.0 + 4.0 * m.rho * k0 * k0) - 2.0 * k0 * s))

# ==================== EIGENBASIS ====================

def eigenfunctions(n_max: int, alpha: float, x: ArrayLike, strict: bool = True) -> np.ndarray:
    """
    All <x|n;alpha> for n = 0..n_max, shape (n_max+1,) + shape(x).

    Uses the orthonormal Laguerre recurrence on y = x^2,

        l_{n+1} = [(2n+alpha-y) l_n - sqrt(n(n+alpha-1)) l_{n-1}] / sqrt((n+1)(n+alpha)),

    with l_0 = G(alpha)^{-1/2}, then multiplies by sqrt(2) x^{alpha-1/2} e^{-x^2/2}
    formed in log space. Large l_n are rescaled into the log envelope as the
    recurrence runs, so x far past the turning point is safe.

    `strict=False` admits any alpha > 0 (coupled formulas with alpha = gamma + 1
    evaluate the basis below the physical range).
    """
    if n_max < 0:
        raise DomainError(f"n_max must be >= 0, got {n_max}")
    if strict and not alpha > 1.5:
        raise DomainError(f"alpha must exceed 3/2, got {alpha}")
    if not alpha > 0.0:
        raise DomainError(f"alpha must be > 0, got {alpha}")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0.0):
        raise DomainError("eigenfunctions are defined on x >= 0")
    y = x * x
    positive = x > 0.0
    # log of the envelope; grows by the rescaling shifts below
    log_env = np.where(
        positive,
        0.5 * math.log(2.0) + (alpha - 0.5) * np.log(np.where(positive, x, 1.0)) - 0.5 * y,
        -np.inf,
    )
    out = np.empty((n_max + 1,) + x.shape)
    prev = np.zeros_like(y)
    cur = np.full_like(y, math.exp(-0.5 * gammaln(alpha)))
    with np.errstate(over="ignore", invalid="ignore"):
        out[0] = cur * np.exp(log_env)
        for n in range(n_max):
            nxt = ((2 * n + alpha - y) * cur - math.sqrt(n * (n + alpha - 1.0)) * prev) / math.sqrt(
                (n + 1.0) * (n + alpha)
            )
            prev, cur = cur, nxt
            big = np.abs(cur) > _RESCALE
            if np.any(big):
                factor = np.where(big, 1.0 / _RESCALE, 1.0)
                prev, cur = prev * factor, cur * factor
                log_env = log_env + np.where(big, math.log(_RESCALE), 0.0)
            out[n + 1] = cur * np.exp(log_env)
    if not np.all(np.isfinite(out)):
        raise RangeOverflowError(f"eigenfunctions overflow for x up to {float(np.max(x))}")
    return out


def eigenfunction(n: int, alpha: float, x: ArrayLike) -> ArrayLike:
    """<x|n;alpha>; vanishes at x = 0."""
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    values = eigenfunctions(n, alpha, x)[n]
    return float(values) if np.ndim(values) == 0 else values


def eigenfunction_molecular(n: int, m: MolecularParams, x: ArrayLike) -> ArrayLike:
    """beta^{1/4} <beta^{1/2} x | n; alpha(a)>, beta = sqrt(rho)/kappa0, normalized in L^2(dx)."""
    beta = math.sqrt(m.rho) / m.kappa0
    alpha = alpha_from_a(molecular_to_a(m))
    values = beta ** 0.25 * eigenfunctions(n, alpha, math.sqrt(beta) * np.asarray(x, dtype=float))[n]
    return float(values) if np.ndim(values) == 0 else values


def basis_gram(n_max: int, alpha: float, rule: QuadratureRule) -> np.ndarray:
    """Quadrature Gram matrix of the eigenbasis; the identity up to rule error."""
    if rule.domain != "half_line":
        raise DomainError("basis Gram matrix needs a half-line rule")
    psi = eigenfunctions(n_max, alpha, rule.nodes)
    return (psi * rule.weights) @ psi.T


def _five_point_second_derivative(f, x: np.ndarray, h: float) -> np.ndarray:
    return (-f(x + 2 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) - f(x - 2 * h)) / (12.0 * h * h)


def rayleigh_quotient(n: int, alpha: float, x: ArrayLike, h: float = 1e-3) -> np.ndarray:
    """(-psi'' + (x^2 + a/x^2) psi)/psi with a 5-point stencil; x must exceed 2h."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x <= 2.0 * h):
        raise DomainError(f"rayleigh quotient needs x > 2h = {2 * h}")
    a = a_from_alpha(alpha)

    def psi(t):
        return eigenfunctions(n, alpha, t)[n]

    values = psi(x)
    d2 = _five_point_second_derivative(psi, x, h)
    return (-d2 + (x * x + a / (x * x)) * values) / values


def rayleigh_quotient_molecular(n: int, m: MolecularParams, x: ArrayLike, h: float = 1e-3) -> np.ndarray:
    """Same check for -d^2/dx^2 + rho (x/k0 - k0/x)^2."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x <= 2.0 * h):
        raise DomainError(f"rayleigh quotient needs x > 2h = {2 * h}")

    def psi(t):
        return np.asarray(eigenfunction_molecular(n, m, t))

    values = psi(x)
    d2 = _five_point_second_derivative(psi, x, h)
    potential = m.rho * (x / m.kappa0 - m.kappa0 / x) ** 2
    return (-d2 + potential * values) / values


__all__ = [
    "alpha_from_a", "a_from_alpha", "params_from_a", "params_from_alpha", "molecular_to_a",
    "params_from_molecular", "couple_gamma", "set_gamma", "with_epsilon", "eigenvalue",
    "eigenvalue_molecular", "eigenfunctions", "eigenfunction", "eigenfunction_molecular",
    "basis_gram", "rayleigh_quotient", "rayleigh_quotient_molecular",
]
