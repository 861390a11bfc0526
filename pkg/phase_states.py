"""
Generalized phase coherent states (GPCS).

    |theta; eps, gamma, alpha> = N^{-1/2} sum_n g_n^gamma(e^{i theta}) / sqrt(sigma(n)) |n; alpha>,
    sigma(n) = (gamma+1)_n / n! * e^{n eps}

ROUTES:
    - normalization: direct series sum_n n! e^{-n eps} / (gamma+1)_n |g_n|^2, or the
      closed form (1-r)/D^{1+gamma/2} 2F1(b, b; gamma+1; rho), r = e^{-eps},
      D = |1 - r e^{i theta}|^2, b = gamma/2 + 1, rho = 4 r sin^2(theta/2)/D.
    - wavefunction: truncated basis expansion (any alpha), or, in the coupled
      regime alpha = gamma + 1, the closed form built on 1F1 with
      tau = e^{-eps/2} and kappa = (1 - e^{i theta}) tau / ((1 - tau)(1 - tau e^{i theta})).

Complex powers use the principal branch. For tau < 1, Re(1 - tau e^{i theta}) > 0,
so 1 - tau e^{i theta} never reaches the branch cut.
"""

import cmath
import math
import logging
from functools import partial
from typing import Literal, Optional, Tuple, Union

import numpy as np
from scipy.special import gammaln

from infrastructure import (
    CoefficientVector,
    ConvergenceError,
    DomainError,
    ModelParams,
    QuadratureRule,
    RangeOverflowError,
    SeriesResult,
    parallel_map,
    settings,
)
from circular_jacobi import circular_jacobi_sequence, weight_density
from pho_basis import eigenfunctions
from quadrature import half_line_rule, integrate
from special_functions import LOG_MAX, binomial_tail_bound, binomial_tail_terms, hyp1f1_scaled, hyp2f1

log = logging.getLogger("gpcs.states")

NormalizationRoute = Literal["series", "closed"]
ArrayLike = Union[float, np.ndarray]

STATE_WINDOW_EFOLDS = 45.0
_UNCAPPED = 10 ** 12

# ==================== SIGMA / NORMALIZATION ====================

def log_sigma(n: ArrayLike, gamma: float, epsilon: float) -> ArrayLike:
    """ln sigma(n) = ln (gamma+1)_n - ln n! + n eps."""
    n = np.asarray(n, dtype=float)
    if np.any(n < 0):
        raise DomainError("sigma index must be >= 0")
    out = gammaln(gamma + 1.0 + n) - gammaln(gamma + 1.0) - gammaln(n + 1.0) + n * epsilon
    return float(out) if out.ndim == 0 else out


def sigma(n: int, gamma: float, epsilon: float) -> float:
    ls = log_sigma(n, gamma, epsilon)
    if ls > LOG_MAX:
        raise RangeOverflowError(f"sigma({n}) overflows; use log_sigma")
    return math.exp(ls)


def _check_state_args(gamma: float, epsilon: float) -> None:
    if not gamma >= 0.0:
        raise DomainError(f"gamma must be >= 0, got {gamma}")
    if not epsilon > 0.0:
        raise DomainError(f"epsilon must be > 0, got {epsilon}")


def normalization_series(gamma: float, epsilon: float, theta: float, tol: Optional[float] = None) -> SeriesResult:
    """
    N(theta) as the convergent series, stopped once the tail is below tol times
    the partial sum. The tail is bounded through |g_n| <= (gamma+1)_n / n!,
    i.e. by sum (gamma+1)_n/n! e^{-n eps}.

    The size grows like 1/eps; past GPCS_MAX_NORMALIZATION_TERMS this raises
    ConvergenceError with the size the bound asks for.
    """
    _check_state_args(gamma, epsilon)
    settings.check_epsilon(epsilon, "series")
    if epsilon < settings.CLOSED_FORM_EPS_FLOOR:
        log.warning(f"normalization series at eps={epsilon}: expect a long series")
    tol = tol or 1e-15
    c = gamma + 1.0
    r = math.exp(-epsilon)
    cap = settings.MAX_NORMALIZATION_TERMS
    n_max = min(1024, cap)
    while True:
        g = circular_jacobi_sequence(n_max, gamma, theta)
        n = np.arange(n_max + 1, dtype=float)
        value = math.fsum(np.exp(-log_sigma(n, gamma, epsilon)) * np.abs(g) ** 2)
        tail = binomial_tail_bound(c, r, n_max)
        if tail <= tol * value:
            break
        # partial sums only grow, so this size is never too small
        needed = binomial_tail_terms(c, r, tol * value, max_terms=_UNCAPPED)
        if n_max >= cap:
            raise ConvergenceError(
                f"normalization series needs {needed} terms for relative tail {tol:.1e} (cap {cap})",
                terms_used=n_max + 1,
                suggested=needed,
            )
        n_max = min(cap, needed, 4 * n_max)
    log.debug(f"normalization series: gamma={gamma}, eps={epsilon}, theta={theta}, {n_max + 1} terms")
    return SeriesResult(value=value, terms_used=n_max + 1, tail_bound=tail)


def normalization_closed(gamma: float, epsilon: float, theta: float) -> float:
    """
    Closed form of N(theta). Supported for eps >= the closed-form floor; the 2F1
    argument approaches 1 like 1 - O(eps^2) away from theta = 0.
    """
    _check_state_args(gamma, epsilon)
    settings.check_epsilon(epsilon, "closed")
    r = math.exp(-epsilon)
    one_minus_r = -math.expm1(-epsilon)
    s2 = math.sin(0.5 * theta) ** 2
    d = one_minus_r * one_minus_r + 4.0 * r * s2
    b = 0.5 * gamma + 1.0
    hyp = hyp2f1(b, b, gamma + 1.0, 4.0 * r * s2 / d, complement=one_minus_r * one_minus_r / d)
    return one_minus_r * hyp / d ** b


def normalization(gamma: float, epsilon: float, theta: float, route: NormalizationRoute = "closed") -> float:
    if route == "closed":
        return normalization_closed(gamma, epsilon, theta)
    if route == "series":
        return normalization_series(gamma, epsilon, theta).real
    raise DomainError(f"Unknown normalization route: {route}")


def measure_density(gamma: float, epsilon: float, theta: ArrayLike) -> ArrayLike:
    """Density of d mu_{gamma,eps} with respect to d theta: Omega_gamma(theta) N(theta)."""
    thetas = np.atleast_1d(np.asarray(theta, dtype=float))
    values = np.array([normalization_closed(gamma, epsilon, t) for t in thetas]) * weight_density(gamma, thetas)
    return float(values[0]) if np.ndim(theta) == 0 else values

# ==================== COEFFICIENTS ====================

def suggested_n_max(gamma: float, epsilon: float, tail: float, norm: float = 1.0) -> int:
    """Smallest N with sum_{n > N} |c_n|^2 <= tail for every theta (norm = N(theta) lower bound)."""
    _check_state_args(gamma, epsilon)
    return binomial_tail_terms(gamma + 1.0, math.exp(-epsilon), tail * norm)


def coefficient_values(n_max: int, gamma: float, epsilon: float, theta: float, norm: float) -> np.ndarray:
    """c_0..c_{n_max} given the normalization value."""
    g = circular_jacobi_sequence(n_max, gamma, theta)
    n = np.arange(n_max + 1, dtype=float)
    return g * np.exp(-0.5 * (log_sigma(n, gamma, epsilon) + math.log(norm)))


def coefficients(
    n_max: Optional[int],
    params: ModelParams,
    theta: float,
    tail_tol: Optional[float] = None,
    normalization_route: NormalizationRoute = "series",
) -> CoefficientVector:
    """
    Truncated coefficient vector with an a-priori tail bound.

    n_max=None picks the smallest size meeting `tail_tol` (default
    GPCS_COEFFICIENT_TAIL). An explicit n_max whose tail exceeds it raises
    ConvergenceError carrying the suggested size; tail_tol=math.inf accepts
    any truncation.
    """
    gamma = params.require_gamma()
    eps = params.epsilon
    norm = normalization(gamma, eps, theta, normalization_route)
    target = settings.COEFFICIENT_TAIL if tail_tol is None else tail_tol
    if n_max is None:
        if not math.isfinite(target):
            raise DomainError("automatic truncation needs a finite tail_tol")
        n_max = suggested_n_max(gamma, eps, target, norm)
    if n_max < 0:
        raise DomainError(f"n_max must be >= 0, got {n_max}")
    tail = binomial_tail_bound(gamma + 1.0, math.exp(-eps), n_max) / norm
    if tail > target:
        suggested = suggested_n_max(gamma, eps, target, norm)
        raise ConvergenceError(
            f"n_max={n_max} leaves tail {tail:.3e} > {target:.1e}; use n_max >= {suggested}",
            terms_used=n_max + 1,
            suggested=suggested,
        )
    c = coefficient_values(n_max, gamma, eps, theta, norm)
    return CoefficientVector(
        params=params, theta=theta, coeffs=c, truncation_tail=min(tail, 1.0), normalization=norm,
    )


def phase_coherent_state(rho: float, theta: float, n_max: int) -> np.ndarray:
    """PCS coefficients sqrt(1-rho^2) rho^n e^{i n theta}."""
    if not (0.0 <= rho < 1.0):
        raise DomainError(f"rho must lie in [0, 1), got {rho}")
    n = np.arange(n_max + 1)
    return math.sqrt(1.0 - rho * rho) * rho ** n * np.exp(1j * n * theta)

# ==================== WAVEFUNCTIONS ====================

def series_truncation(gamma: float, epsilon: float, theta: float, tol: float, norm: float) -> Tuple[int, float]:
    """
    Size and pointwise tail factor of the basis expansion.

    |<x|n;alpha>| <= sqrt(2x) and |c_n| <= ((gamma+1)_n/n!) e^{-n eps/2} / sqrt(N),
    so the error at x is at most sqrt(2x) * tail_factor.
    """
    tau = math.exp(-0.5 * epsilon)
    n_max = binomial_tail_terms(gamma + 1.0, tau, tol * math.sqrt(norm))
    return n_max, binomial_tail_bound(gamma + 1.0, tau, n_max) / math.sqrt(norm)


def state_series(
    gamma: float, alpha: float, epsilon: float, theta: float, x: ArrayLike,
    tol: Optional[float] = None, strict: bool = True,
) -> ArrayLike:
    """sum_n c_n <x|n;alpha>, truncated so the pointwise error is below tol * sqrt(2x)."""
    _check_state_args(gamma, epsilon)
    tol = tol or 1e-13
    norm = normalization_series(gamma, epsilon, theta).real
    n_max, tail = series_truncation(gamma, epsilon, theta, tol, norm)
    c = coefficient_values(n_max, gamma, epsilon, theta, norm)
    basis = eigenfunctions(n_max, alpha, x, strict=strict)
    values = np.tensordot(c, basis, axes=(0, 0))
    log.debug(f"series state: {n_max + 1} terms, tail factor {tail:.2e}")
    return complex(values) if np.ndim(values) == 0 else values


def wavefunction_series(params: ModelParams, theta: float, x: ArrayLike, tol: Optional[float] = None) -> ArrayLike:
    """<x|theta; eps, gamma, alpha> by the basis expansion; works uncoupled."""
    return state_series(params.require_gamma(), params.alpha, params.epsilon, theta, x, tol)


def _closed_geometry(epsilon: float, theta: float) -> Tuple[float, float, complex, float]:
    """tau, 1 - tau, kappa and |1 - tau e^{i theta}|^2, all formed without cancellation."""
    tau = math.exp(-0.5 * epsilon)
    omt = -math.expm1(-0.5 * epsilon)
    s2 = math.sin(0.5 * theta) ** 2
    d2 = omt * omt + 4.0 * tau * s2
    kappa = complex(2.0 * tau * (1.0 + tau) * s2 / (omt * d2), -tau * math.sin(theta) / d2)
    return tau, omt, kappa, d2


def _closed_point(x: float, gamma: float, log_pref: complex, kappa: complex, decay: float, phase: float) -> complex:
    if x <= 0.0:
        return 0.0j
    x2 = x * x
    scaled = hyp1f1_scaled(1.0 + 0.5 * gamma, 1.0 + gamma, kappa * x2).value
    exponent = log_pref + (gamma + 0.5) * math.log(x) - decay * x2 + 1j * phase * x2
    return cmath.exp(exponent) * scaled


def closed_state_unnormalized(gamma: float, epsilon: float, theta: float, x: ArrayLike) -> ArrayLike:
    """
    sqrt(N) <x|theta> in the coupled regime alpha = gamma + 1:

        sqrt(2) x^{gamma+1/2} (1-tau)^{-gamma/2} / (sqrt(G(gamma+1)) (1 - tau e^{i theta})^{1+gamma/2})
            exp(-(x^2/2) coth(eps/4)) 1F1(1+gamma/2; 1+gamma; kappa x^2)

    The exponentials are merged with the e^{-z} scaling of 1F1, leaving
    exp(-x^2 (1+tau)(1-tau)/(2|1-tau e^{i theta}|^2) + i Im(kappa) x^2).
    """
    if not gamma >= 0.0:
        raise DomainError(f"gamma must be >= 0, got {gamma}")
    settings.check_epsilon(epsilon, "closed")
    tau, omt, kappa, d2 = _closed_geometry(epsilon, theta)
    one_minus_tau_u = complex(omt + 2.0 * tau * math.sin(0.5 * theta) ** 2, -tau * math.sin(theta))
    log_pref = (
        0.5 * math.log(2.0) - 0.5 * float(gammaln(gamma + 1.0)) - 0.5 * gamma * math.log(omt)
        - (1.0 + 0.5 * gamma) * cmath.log(one_minus_tau_u)
    )
    decay = 0.5 * (1.0 + tau) * omt / d2
    point = partial(_closed_point, gamma=gamma, log_pref=log_pref, kappa=kappa, decay=decay, phase=kappa.imag)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xs < 0.0):
        raise DomainError("wavefunctions are defined on x >= 0")
    values = np.array(parallel_map(point, xs.tolist()), dtype=complex)
    return complex(values[0]) if np.ndim(x) == 0 else values.reshape(np.shape(x))


def state_closed(gamma: float, epsilon: float, theta: float, x: ArrayLike) -> ArrayLike:
    """Normalized closed-form state, alpha = gamma + 1."""
    return closed_state_unnormalized(gamma, epsilon, theta, x) / math.sqrt(normalization_closed(gamma, epsilon, theta))


def wavefunction_closed(params: ModelParams, theta: float, x: ArrayLike) -> ArrayLike:
    """Closed-form <x|theta; eps, gamma, gamma+1>; needs coupled parameters."""
    if not params.coupled:
        raise DomainError("closed-form wavefunction needs coupled parameters (alpha = gamma + 1)")
    return state_closed(params.require_gamma(), params.epsilon, theta, x)


def state_rule(gamma: float, epsilon: float, theta: float, n_nodes: Optional[int] = None) -> QuadratureRule:
    """
    Half-line rule wide enough for |<x|theta>|^2.

    The density falls off like exp(-2 d x^2) with d = (1+tau)(1-tau)/(2|1-tau e^{i theta}|^2),
    which gets small near theta = pi for small eps, so the window is stretched to reach
    exp(-STATE_WINDOW_EFOLDS).
    """
    _check_state_args(gamma, epsilon)
    tau, omt, _, d2 = _closed_geometry(epsilon, theta)
    decay = 0.5 * (1.0 + tau) * omt / d2
    reach = math.sqrt(STATE_WINDOW_EFOLDS / (2.0 * decay))
    return half_line_rule(n_nodes or settings.HALF_LINE_NODES, scale=max(1.0, reach / settings.HALF_LINE_SPAN))


def state_norm_value(
    gamma: float, alpha: float, epsilon: float, theta: float,
    route: Literal["series", "closed"] = "closed", rule: Optional[QuadratureRule] = None, strict: bool = True,
) -> float:
    """int_0^inf |<x|theta; eps, gamma, alpha>|^2 dx; the closed route needs alpha = gamma + 1."""
    rule = rule or state_rule(gamma, epsilon, theta)
    if route == "closed":
        if not math.isclose(alpha, gamma + 1.0, rel_tol=0.0, abs_tol=1e-12):
            raise DomainError(f"closed route needs alpha = gamma + 1, got alpha={alpha}, gamma={gamma}")
        values = state_closed(gamma, epsilon, theta, rule.nodes)
    elif route == "series":
        values = state_series(gamma, alpha, epsilon, theta, rule.nodes, strict=strict)
    else:
        raise DomainError(f"Unknown state route: {route}")
    return integrate(rule, np.abs(values) ** 2).real


def state_norm(
    params: ModelParams, theta: float, rule: Optional[QuadratureRule] = None,
    route: Literal["series", "closed"] = "closed",
) -> float:
    """int_0^inf |<x|state>|^2 dx by half-line quadrature."""
    if route == "closed" and not params.coupled:
        raise DomainError("closed-form wavefunction needs coupled parameters (alpha = gamma + 1)")
    return state_norm_value(params.require_gamma(), params.alpha, params.epsilon, theta, route, rule)


__all__ = [
    "log_sigma", "sigma", "normalization_series", "normalization_closed", "normalization",
    "measure_density", "suggested_n_max", "coefficient_values", "coefficients", "phase_coherent_state",
    "series_truncation", "state_series", "wavefunction_series", "closed_state_unnormalized",
    "state_closed", "wavefunction_closed", "state_rule", "state_norm_value", "state_norm",
]
