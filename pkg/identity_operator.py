"""
The damped projector O_eps = sum_m e^{-m eps} |m;alpha><alpha;m| on the half-line.

Integrating the GPCS projectors against d mu_{gamma,eps} yields O_eps, which tends to
the identity as eps -> 0+. Two independent realizations are provided:

    kernel_quadrature   O_eps[phi](u) = int_0^inf G(u, v) phi(v) dv with
                        G = 2 (uv)^{alpha-1/2} e^{-(u^2+v^2)/2} K(e^{-eps}; u^2, v^2)
    basis_expansion     project onto the eigenbasis, damp, resynthesize

plus the theta-integral block check that ties the operator back to the states.
"""

import math
import logging
from typing import List, Literal, Optional, Sequence

import numpy as np

from infrastructure import (
    DomainError,
    GridFunction,
    OperatorApplication,
    QuadratureRule,
    VerificationReport,
    settings,
)
from circular_jacobi import default_circle_rule, weighted_integral
from phase_states import coefficient_values, normalization_closed
from pho_basis import eigenfunctions
from special_functions import hille_hardy_series, log_hille_hardy_kernel

log = logging.getLogger("gpcs.identity")

Route = Literal["kernel_quadrature", "basis_expansion"]

# ==================== KERNEL ====================

def _check(epsilon: float, alpha: float) -> None:
    if not epsilon > 0.0:
        raise DomainError(f"epsilon must be > 0, got {epsilon}")
    if not alpha > 1.5:
        raise DomainError(f"alpha must exceed 3/2, got {alpha}")


def kernel_G(epsilon: float, alpha: float, u, v):
    """Closed-form kernel G_eps(u, v); symmetric, vanishing as u or v -> 0."""
    _check(epsilon, alpha)
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if np.any(u < 0.0) or np.any(v < 0.0):
        raise DomainError("kernel arguments must be >= 0")
    tau = math.exp(-epsilon)
    log_k = log_hille_hardy_kernel(tau, u * u, v * v, alpha, one_minus_tau=-math.expm1(-epsilon))
    uv = u * v
    positive = uv > 0.0
    log_g = np.where(
        positive,
        math.log(2.0) + (alpha - 0.5) * np.log(np.where(positive, uv, 1.0)) - 0.5 * (u * u + v * v) + log_k,
        -np.inf,
    )
    out = np.exp(log_g)
    return float(out) if out.ndim == 0 else out


def kernel_series(epsilon: float, alpha: float, u: float, v: float, n_terms: int = 60) -> float:
    """Partial sum sum_{m < n_terms} e^{-m eps} <u|m><m|v> through the Laguerre bilinear series."""
    _check(epsilon, alpha)
    if u <= 0.0 or v <= 0.0:
        return 0.0
    pref = 2.0 * math.exp((alpha - 0.5) * math.log(u * v) - 0.5 * (u * u + v * v))
    return pref * hille_hardy_series(math.exp(-epsilon), u * u, v * v, alpha, n_terms)


def kernel_matrix(epsilon: float, alpha: float, nodes: np.ndarray) -> np.ndarray:
    """G(x_i, x_j) on a node set, assembled row by row."""
    nodes = np.asarray(nodes, dtype=float)
    out = np.empty((nodes.size, nodes.size))
    for i, u in enumerate(nodes):
        out[i] = kernel_G(epsilon, alpha, u, nodes)
    return out


def kernel_bandwidth(epsilon: float) -> float:
    """Width sqrt(2(1-tau)/(1+tau)) of the Gaussian ridge of G along u = v."""
    tau = math.exp(-epsilon)
    return math.sqrt(2.0 * -math.expm1(-epsilon) / (1.0 + tau))


def resolution_warning(epsilon: float, rule: QuadratureRule) -> Optional[str]:
    """Warn when bulk node spacing exceeds the kernel bandwidth."""
    nodes = rule.nodes
    bulk = nodes[nodes < 0.75 * nodes[-1]]
    spacing = float(np.max(np.diff(bulk))) if bulk.size > 1 else float(nodes[-1])
    width = kernel_bandwidth(epsilon)
    if spacing > width:
        return f"kernel bandwidth {width:.3g} below node spacing {spacing:.3g} at eps={epsilon}"
    return None

# ==================== APPLICATION ====================

def apply_O_kernel(epsilon: float, alpha: float, phi: GridFunction) -> OperatorApplication:
    """Quadrature of the kernel integral at every node of phi's half-line rule."""
    if phi.domain != "half_line":
        raise DomainError("apply_O_kernel needs a half-line grid function")
    _check(epsilon, alpha)
    settings.check_epsilon(epsilon, "kernel")
    notes: List[str] = []
    msg = resolution_warning(epsilon, phi.rule)
    if msg:
        log.warning(msg)
        notes.append(msg)
    g = kernel_matrix(epsilon, alpha, phi.nodes)
    out = g @ (phi.rule.weights * phi.values)
    return OperatorApplication(
        epsilon=epsilon, alpha=alpha, input=phi, output=phi.with_values(out),
        route="kernel_quadrature", warnings=notes,
    )


def apply_O_basis(epsilon: float, alpha: float, phi: GridFunction, n_max: int = 64) -> OperatorApplication:
    """Project onto |m;alpha>, m <= n_max, damp by e^{-m eps} and resynthesize."""
    if phi.domain != "half_line":
        raise DomainError("apply_O_basis needs a half-line grid function")
    _check(epsilon, alpha)
    notes: List[str] = []
    psi = eigenfunctions(n_max, alpha, phi.nodes)
    proj = psi @ (phi.rule.weights * phi.values)
    norm2 = phi.l2_norm() ** 2
    captured = float(np.sum(np.abs(proj) ** 2))
    if norm2 > 0.0 and captured < 0.999 * norm2:
        msg = f"projection onto {n_max + 1} basis states keeps {captured / norm2:.4f} of the norm"
        log.warning(msg)
        notes.append(msg)
    damping = np.exp(-epsilon * np.arange(n_max + 1))
    out = (damping * proj) @ psi
    return OperatorApplication(
        epsilon=epsilon, alpha=alpha, input=phi, output=phi.with_values(out),
        route="basis_expansion", warnings=notes,
    )


def apply_O(epsilon: float, alpha: float, phi: GridFunction, route: Optional[Route] = None) -> OperatorApplication:
    """Kernel route when eps clears the kernel floor, otherwise the basis route."""
    if route is None:
        route = "kernel_quadrature" if epsilon >= settings.KERNEL_EPS_FLOOR else "basis_expansion"
    if route == "kernel_quadrature":
        return apply_O_kernel(epsilon, alpha, phi)
    return apply_O_basis(epsilon, alpha, phi)


def grid_inner(rule: QuadratureRule, f: np.ndarray, g: np.ndarray) -> complex:
    return complex(np.sum(rule.weights * np.conj(f) * g))


def self_adjointness_defect(epsilon: float, alpha: float, phi: GridFunction, chi: GridFunction) -> float:
    """|<O phi, chi> - <phi, O chi>| on the grid."""
    o_phi = apply_O_kernel(epsilon, alpha, phi).output.values
    o_chi = apply_O_kernel(epsilon, alpha, chi).output.values
    rule = phi.rule
    return abs(grid_inner(rule, o_phi, chi.values) - grid_inner(rule, phi.values, o_chi))


def min_damping_eigenvalue(epsilon: float, alpha: float, rule: QuadratureRule) -> float:
    """Smallest eigenvalue of W^{1/2} G W^{1/2}; nonnegative up to rounding."""
    _check(epsilon, alpha)
    root_w = np.sqrt(rule.weights)
    sym = root_w[:, None] * kernel_matrix(epsilon, alpha, rule.nodes) * root_w[None, :]
    return float(np.linalg.eigvalsh(0.5 * (sym + sym.T))[0])

# ==================== CONVERGENCE ====================

def convergence_report(
    alpha: float, phi: GridFunction, eps_schedule: Sequence[float], floor: Optional[float] = None,
) -> List[VerificationReport]:
    """
    Grid-L2 errors ||O_eps[phi] - phi|| along a decreasing schedule.

    One report per eps (passing when the error dropped, or is already below the
    noise floor), then a summary with the fitted power law error ~ eps^rate.
    """
    eps = [float(e) for e in eps_schedule]
    if len(eps) < 2 or any(b >= a for a, b in zip(eps, eps[1:])):
        raise DomainError(f"schedule must be strictly decreasing with at least two entries, got {eps}")
    norm = phi.l2_norm()
    floor = 1e-8 * max(norm, 1e-300) if floor is None else floor
    reports: List[VerificationReport] = []
    errors: List[float] = []
    for k, e in enumerate(eps):
        app = apply_O(e, alpha, phi)
        diff = phi.with_values(app.output.values - phi.values)
        err = diff.l2_norm()
        prev = errors[-1] if errors else math.inf
        ok = err < prev or err <= floor
        reports.append(VerificationReport(
            check="identity.convergence",
            params={"alpha": alpha, "eps": e, "route": app.route},
            error=err,
            tol=prev if math.isfinite(prev) else norm,
            passed=ok,
            detail="; ".join(app.warnings) or None,
        ))
        errors.append(err)
    fit = [(e, r) for e, r in zip(eps, errors) if r > floor]
    rate = float(np.polyfit(np.log([f[0] for f in fit]), np.log([f[1] for f in fit]), 1)[0]) if len(fit) >= 2 else None
    reports.append(VerificationReport(
        check="identity.convergence.monotone",
        params={"alpha": alpha, "schedule": eps, "rate": rate},
        error=errors[-1],
        tol=errors[0] if errors[0] > 0 else floor,
        passed=all(r.passed for r in reports),
        detail=None if rate is None else f"error ~ eps^{rate:.3f}",
    ))
    return reports

# ==================== THETA-INTEGRAL BLOCK ====================

def resolve_identity_block(
    gamma: float, epsilon: float, n_block: int, rule: Optional[QuadratureRule] = None,
) -> np.ndarray:
    """
    int c_m(theta) conj(c_n(theta)) d mu_{gamma,eps}(theta) for m, n < n_block.

    d mu = Omega_gamma N d theta, so the integrand reduces to
    g_m conj(g_n) / sqrt(sigma(m) sigma(n)); the result must be diag(e^{-m eps}).
    """
    if n_block < 1:
        raise DomainError(f"n_block must be >= 1, got {n_block}")
    rule = rule or default_circle_rule(gamma)
    norms = np.array([normalization_closed(gamma, epsilon, t) for t in rule.nodes])
    coeffs = np.stack([
        coefficient_values(n_block - 1, gamma, epsilon, t, nv) for t, nv in zip(rule.nodes, norms)
    ], axis=1)
    products = coeffs[:, None, :] * np.conj(coeffs)[None, :, :] * norms[None, None, :]
    return weighted_integral(gamma, rule, products)


__all__ = [
    "kernel_G", "kernel_series", "kernel_matrix", "kernel_bandwidth", "resolution_warning",
    "apply_O_kernel", "apply_O_basis", "apply_O", "grid_inner", "self_adjointness_defect",
    "min_damping_eigenvalue", "convergence_report", "resolve_identity_block",
]
