"""
Verification suites: named numerical checks grouped by module.

Every check takes a SuiteOptions and returns VerificationReport records, one per
parameter point (or one summary). A GPCSError inside a cell becomes a failing
report carrying the message, so a run always produces a complete stream.

    specfun    special-function engines and their identities
    pho        eigenbasis and spectrum
    cjacobi    circular Jacobi orthogonality
    gpcs       normalization, coefficients and the two wavefunction routes
    identity   the damped projector O_eps
    transform  the coherent-state transform
"""

import math
import logging
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.special import gammaln, hyp1f1 as scipy_hyp1f1, ive

from infrastructure import ConfigError, GPCSError, GridFunction, MolecularParams, VerificationReport
from circular_jacobi import (
    circular_jacobi,
    default_circle_rule,
    gram_matrix,
    squared_norm,
    weighted_integral,
)
from cs_transform import (
    kappa_identities,
    laguerre_confluent_integral,
    q_epsilon_analytic,
    q_epsilon_quadrature_all,
    transform_eigenstate,
    transform_function,
)
from identity_operator import (
    apply_O_basis,
    apply_O_kernel,
    convergence_report,
    kernel_G,
    kernel_matrix,
    kernel_series,
    min_damping_eigenvalue,
    resolve_identity_block,
    self_adjointness_defect,
)
from pho_basis import (
    basis_gram,
    eigenfunction_molecular,
    eigenfunctions,
    eigenvalue,
    eigenvalue_molecular,
    params_from_alpha,
    rayleigh_quotient,
    rayleigh_quotient_molecular,
    set_gamma,
)
from phase_states import (
    coefficients,
    normalization_closed,
    normalization_series,
    phase_coherent_state,
    state_closed,
    state_norm_value,
    state_series,
)
from quadrature import circle_rule, half_line_rule
from special_functions import (
    bilateral_laguerre_closed,
    bilateral_laguerre_series,
    bilinear_hypergeometric_closed,
    bilinear_hypergeometric_series,
    hille_hardy_kernel,
    hille_hardy_series,
    hyp1f1,
    hyp2f1_connection,
    hyp2f1_series,
    laguerre,
    log_bessel_i,
)

log = logging.getLogger("gpcs.verify")

SUITE_ORDER = ["specfun", "pho", "cjacobi", "gpcs", "identity", "transform"]


class SuiteOptions(BaseModel):
    """Parameter grids shared by the checks; defaults are the desk-scale acceptance grid."""
    model_config = ConfigDict(frozen=True)

    gammas: List[float] = Field(default_factory=lambda: [0.0, 0.5, 1.5, 3.0])
    epsilons: List[float] = Field(default_factory=lambda: [0.1, 0.5, 1.0])
    thetas: List[float] = Field(default_factory=lambda: [0.0, math.pi / 4, math.pi / 2, math.pi, 1.5 * math.pi])
    alphas: List[float] = Field(default_factory=lambda: [2.0, 2.5, 3.5])
    n_max: int = Field(default=12, ge=0)
    seed: int = 20240611
    tol_scale: float = Field(default=1.0, gt=0.0)

    def tol(self, base: float) -> float:
        return base * self.tol_scale

    def narrowed(
        self,
        gamma: Optional[float] = None,
        epsilon: Optional[float] = None,
        theta: Optional[float] = None,
        alpha: Optional[float] = None,
        n_max: Optional[int] = None,
    ) -> "SuiteOptions":
        """Replace a grid by a single value for every argument that is set."""
        update = {}
        if gamma is not None:
            update["gammas"] = [gamma]
        if epsilon is not None:
            update["epsilons"] = [epsilon]
        if theta is not None:
            update["thetas"] = [theta]
        if alpha is not None:
            update["alphas"] = [alpha]
        if n_max is not None:
            update["n_max"] = n_max
        return SuiteOptions(**{**self.model_dump(), **update})


Check = Callable[[SuiteOptions], List[VerificationReport]]
SUITES: Dict[str, List[Check]] = {name: [] for name in SUITE_ORDER}


def check(suite: str):
    """Register a check function under a suite name."""
    def register(fn: Check) -> Check:
        SUITES[suite].append(fn)
        return fn
    return register


def _cell(name: str, params: Dict, tol: float, compute: Callable[[], float], detail: Optional[str] = None) -> VerificationReport:
    try:
        error = float(compute())
    except GPCSError as e:
        log.warning(f"{name} {params}: {type(e).__name__}: {e}")
        return VerificationReport(
            check=name, params=params, error=math.inf, tol=tol, passed=False, detail=f"{type(e).__name__}: {e}",
        )
    return VerificationReport(check=name, params=params, error=error, tol=tol, passed=bool(error <= tol), detail=detail)


def _rel(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))


def _sup_rel(a, b) -> float:
    """sup|a - b| / sup|b|."""
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b)) / max(float(np.max(np.abs(b))), 1e-300))

# ==================== SPECFUN ====================

@check("specfun")
def check_hyp2f1_overlap(opts: SuiteOptions) -> List[VerificationReport]:
    """Series and connection formula agree where both apply."""
    reports = []
    for g in opts.gammas:
        b, c = 0.5 * g + 1.0, g + 1.0

        def compute(b=b, c=c):
            xs = (0.4, 0.45, 0.5, 0.55, 0.6)
            series = [hyp2f1_series(b, b, c, x).real for x in xs]
            connected = [hyp2f1_connection(b, b, c, x).real for x in xs]
            return _rel(connected, series)

        reports.append(_cell("specfun.hyp2f1_overlap", {"gamma": g}, opts.tol(1e-10), compute))
    return reports


@check("specfun")
def check_laguerre_vs_hyp1f1(opts: SuiteOptions) -> List[VerificationReport]:
    """L_n^(nu)(x) = (nu+1)_n/n! 1F1(-n; nu+1; x)."""
    reports = []
    for nu in (0.5, 1.5, 2.5):
        def compute(nu=nu):
            worst = 0.0
            for n in range(9):
                for x in (0.5, 2.0, 5.0, 8.0):
                    direct = laguerre(n, nu, x)
                    pref = math.exp(gammaln(n + nu + 1.0) - gammaln(n + 1.0) - gammaln(nu + 1.0))
                    ref = pref * hyp1f1(-n, nu + 1.0, x).real
                    worst = max(worst, abs(direct - ref) / max(1.0, abs(ref)))
            return worst

        reports.append(_cell("specfun.laguerre_vs_hyp1f1", {"nu": nu}, opts.tol(1e-10), compute))
    return reports


@check("specfun")
def check_hille_hardy(opts: SuiteOptions) -> List[VerificationReport]:
    """Closed kernel against the bilinear partial sum."""
    reports = []
    # near the diagonal; far-apart pairs make K tiny next to terms of size e^{(xi+zeta)/2}
    points = [(0.5, 0.5), (0.5, 1.5), (4.0, 4.0), (4.0, 6.0), (20.0, 25.0), (25.0, 25.0)]
    for alpha in (1.6, 2.0, 3.5):
        for tau in (0.3, 0.6, 0.9):
            # 200 terms leave a ~5e-9 tail at tau = 0.9, xi = zeta = 25
            n_terms = 200 if tau <= 0.6 else 400

            def compute(alpha=alpha, tau=tau, n_terms=n_terms):
                closed = [hille_hardy_kernel(tau, xi, zeta, alpha) for xi, zeta in points]
                series = [hille_hardy_series(tau, xi, zeta, alpha, n_terms) for xi, zeta in points]
                return _rel(series, closed)

            reports.append(_cell(
                "specfun.hille_hardy", {"alpha": alpha, "tau": tau, "terms": n_terms}, opts.tol(1e-9), compute,
            ))
    return reports


@check("specfun")
def check_kernel_symmetry(opts: SuiteOptions) -> List[VerificationReport]:
    rng = np.random.default_rng(opts.seed)
    tau = rng.uniform(0.05, 0.95, 40)
    xi = rng.uniform(0.0, 20.0, 40)
    zeta = rng.uniform(0.0, 20.0, 40)
    alpha = rng.uniform(1.6, 4.0, 40)

    def compute():
        ab = [hille_hardy_kernel(t, x, z, a) for t, x, z, a in zip(tau, xi, zeta, alpha)]
        ba = [hille_hardy_kernel(t, z, x, a) for t, x, z, a in zip(tau, xi, zeta, alpha)]
        return _rel(ab, ba)

    return [_cell("specfun.kernel_symmetry", {"points": 40}, opts.tol(1e-14), compute)]


@check("specfun")
def check_bessel(opts: SuiteOptions) -> List[VerificationReport]:
    """I_{1/2}(x) = sqrt(2/(pi x)) sinh x across the series/asymptotic switch, and scipy's ive elsewhere."""
    xs = np.array([0.5, 5.0, 25.0, 29.5, 30.5, 35.0, 80.0, 300.0])

    def half_integer():
        exact = 0.5 * np.log(2.0 / (math.pi * xs)) + xs - math.log(2.0) + np.log1p(-np.exp(-2.0 * xs))
        return float(np.max(np.abs(np.asarray(log_bessel_i(0.5, xs)) - exact)))

    def against_scipy():
        worst = 0.0
        for nu in (0.6, 1.0, 2.5, 4.0):
            ours = np.asarray(log_bessel_i(nu, xs))
            ref = np.log(ive(nu, xs)) + xs
            worst = max(worst, float(np.max(np.abs(np.expm1(ours - ref)))))
        return worst

    return [
        _cell("specfun.bessel_half_integer", {"nu": 0.5}, opts.tol(1e-12), half_integer),
        _cell("specfun.bessel_vs_scipy", {"nu": [0.6, 1.0, 2.5, 4.0]}, opts.tol(1e-11), against_scipy),
    ]


@check("specfun")
def check_hyp1f1_real(opts: SuiteOptions) -> List[VerificationReport]:
    """1F1(1+g/2; 1+g; z) on the real line through every route, against scipy."""
    reports = []
    zs = (-30.0, -5.0, 0.5, 5.0, 30.0, 45.0, 60.0)
    for g in opts.gammas:
        a, c = 1.0 + 0.5 * g, 1.0 + g

        def compute(a=a, c=c):
            ours = [hyp1f1(a, c, z).real for z in zs]
            ref = [float(scipy_hyp1f1(a, c, z)) for z in zs]
            return _rel(ours, ref)

        reports.append(_cell("specfun.hyp1f1_real", {"gamma": g}, opts.tol(1e-9), compute))
    return reports

# ==================== PHO ====================

@check("pho")
def check_orthonormality(opts: SuiteOptions) -> List[VerificationReport]:
    rule = half_line_rule(801)
    reports = []
    for alpha in opts.alphas:
        def compute(alpha=alpha):
            gram = basis_gram(opts.n_max, alpha, rule)
            return float(np.max(np.abs(gram - np.eye(opts.n_max + 1))))

        reports.append(_cell("pho.orthonormality", {"alpha": alpha, "n_max": opts.n_max}, opts.tol(1e-9), compute))
    return reports


@check("pho")
def check_rayleigh(opts: SuiteOptions) -> List[VerificationReport]:
    """(H psi_n)/psi_n = lambda_n away from the nodes of psi_n."""
    x = np.linspace(0.3, 4.0, 38)
    reports = []
    for alpha in opts.alphas:
        def compute(alpha=alpha):
            worst = 0.0
            for n in range(6):
                psi = np.abs(eigenfunctions(n, alpha, x)[n])
                keep = psi > 1e-2 * psi.max()
                q = rayleigh_quotient(n, alpha, x[keep])
                worst = max(worst, float(np.max(np.abs(q / eigenvalue(n, alpha) - 1.0))))
            return worst

        reports.append(_cell("pho.rayleigh", {"alpha": alpha}, opts.tol(1e-4), compute))
    return reports


@check("pho")
def check_molecular(opts: SuiteOptions) -> List[VerificationReport]:
    """With sqrt(rho)/kappa0 = 1 the molecular spectrum is the PHO spectrum shifted by -2 rho."""
    def shift():
        worst = 0.0
        for rho, k0 in ((1.0, 1.0), (4.0, 2.0), (0.25, 0.5)):
            m = MolecularParams(rho=rho, kappa0=k0)
            alpha = 1.0 + 0.5 * math.sqrt(1.0 + 4.0 * rho * k0 * k0)
            for n in range(6):
                lam = eigenvalue(n, alpha)
                worst = max(worst, abs(eigenvalue_molecular(n, m) + 2.0 * rho - lam) / lam)
        return worst

    def rayleigh():
        m = MolecularParams(rho=2.0, kappa0=1.2)
        x = np.linspace(0.4, 3.0, 27)
        worst = 0.0
        for n in range(4):
            psi = np.abs(np.asarray(eigenfunction_molecular(n, m, x)))
            keep = psi > 1e-2 * psi.max()
            q = rayleigh_quotient_molecular(n, m, x[keep])
            worst = max(worst, float(np.max(np.abs(q / eigenvalue_molecular(n, m) - 1.0))))
        return worst

    return [
        _cell("pho.molecular_shift", {}, opts.tol(1e-13), shift),
        _cell("pho.molecular_rayleigh", {"rho": 2.0, "kappa0": 1.2}, opts.tol(1e-4), rayleigh),
    ]

# ==================== CJACOBI ====================

@check("cjacobi")
def check_gram(opts: SuiteOptions) -> List[VerificationReport]:
    n_max = 15
    reports = []
    for g in opts.gammas:
        def compute(g=g):
            gram = gram_matrix(n_max, g)
            expected = np.array([squared_norm(n, g) for n in range(n_max + 1)])
            diag = np.max(np.abs(np.diag(gram).real / expected - 1.0))
            off = np.max(np.abs(gram - np.diag(np.diag(gram))))
            return float(max(diag, off))

        reports.append(_cell("cjacobi.gram", {"gamma": g, "n_max": n_max}, opts.tol(1e-10), compute))
    return reports


@check("cjacobi")
def check_circle_symmetries(opts: SuiteOptions) -> List[VerificationReport]:
    rng = np.random.default_rng(opts.seed + 1)
    thetas = rng.uniform(0.0, 2.0 * math.pi, 50)

    def unimodular():
        return max(float(np.max(np.abs(np.abs(circular_jacobi(n, 0.0, thetas)) - 1.0))) for n in range(21))

    def conjugation():
        worst = 0.0
        for g in opts.gammas:
            for n in range(opts.n_max + 1):
                scale = squared_norm(n, g)
                diff = np.conj(circular_jacobi(n, g, thetas)) - circular_jacobi(n, g, -thetas)
                worst = max(worst, float(np.max(np.abs(diff))) / scale)
        return worst

    def mass():
        worst = 0.0
        for g in opts.gammas:
            rule = default_circle_rule(g)
            worst = max(worst, abs(weighted_integral(g, rule, np.ones(rule.size)) - 1.0))
        # sin^2(theta/2) is a trig polynomial, so the uniform rule is exact as well
        uniform = circle_rule(512)
        return max(worst, abs(weighted_integral(2.0, uniform, np.ones(uniform.size)) - 1.0))

    return [
        _cell("cjacobi.unimodular", {"gamma": 0.0}, opts.tol(1e-13), unimodular),
        _cell("cjacobi.conjugation", {"gammas": opts.gammas}, opts.tol(1e-12), conjugation),
        _cell("cjacobi.weight_mass", {"gammas": opts.gammas}, opts.tol(1e-12), mass),
    ]

# ==================== GPCS ====================

@check("gpcs")
def check_bilinear_identity(opts: SuiteOptions) -> List[VerificationReport]:
    """Generating series of products of 2F1 polynomials against its closed form, random points."""
    rng = np.random.default_rng(opts.seed + 2)
    gammas = rng.uniform(0.0, 3.0, 60)
    eps = rng.uniform(0.1, 1.0, 60)
    thetas = rng.uniform(0.0, 2.0 * math.pi, 60)

    def compute():
        worst = 0.0
        for g, e, t in zip(gammas, eps, thetas):
            b, c, r = 0.5 * g + 1.0, g + 1.0, math.exp(-e)
            xi = 1.0 - complex(math.cos(t), math.sin(t))
            lhs = bilinear_hypergeometric_series(b, b, c, xi, xi.conjugate(), r).value
            rhs = bilinear_hypergeometric_closed(b, b, c, xi, xi.conjugate(), r)
            worst = max(worst, abs(lhs - rhs) / abs(rhs))
        return worst

    return [_cell("gpcs.bilinear_identity", {"points": 60}, opts.tol(1e-9), compute)]


@check("gpcs")
def check_bilateral_identity(opts: SuiteOptions) -> List[VerificationReport]:
    """Bilateral Laguerre/2F1 generating formula, random points."""
    rng = np.random.default_rng(opts.seed + 3)
    gammas = rng.uniform(0.0, 3.0, 60)
    ts = rng.uniform(0.05, 0.8, 60)
    thetas = rng.uniform(0.0, 2.0 * math.pi, 60)
    us = rng.uniform(0.1, 4.0, 60)

    def compute():
        worst = 0.0
        for g, t, th, u in zip(gammas, ts, thetas, us):
            y = 1.0 - complex(math.cos(th), math.sin(th))
            lhs = bilateral_laguerre_series(t, 0.5 * g + 1.0, g, y, u).value
            rhs = bilateral_laguerre_closed(t, 0.5 * g + 1.0, g, y, u)
            worst = max(worst, abs(lhs - rhs) / abs(rhs))
        return worst

    return [_cell("gpcs.bilateral_identity", {"points": 60}, opts.tol(1e-9), compute)]


@check("gpcs")
def check_normalization(opts: SuiteOptions) -> List[VerificationReport]:
    reports = []
    for g in opts.gammas:
        for e in opts.epsilons:
            def cross(g=g, e=e):
                series = [normalization_series(g, e, t).real for t in opts.thetas]
                closed = [normalization_closed(g, e, t) for t in opts.thetas]
                return _rel(closed, series)

            reports.append(_cell("gpcs.normalization_cross_route", {"gamma": g, "eps": e}, opts.tol(1e-9), cross))
            if g == 0.0:
                def pcs(e=e):
                    exact = -1.0 / math.expm1(-e)
                    closed = [normalization_closed(0.0, e, t) for t in opts.thetas]
                    series = [normalization_series(0.0, e, t).real for t in opts.thetas]
                    return max(_rel(closed, [exact] * len(closed)), _rel(series, [exact] * len(series)))

                reports.append(_cell("gpcs.normalization_pcs", {"eps": e}, opts.tol(1e-12), pcs))
    return reports


@check("gpcs")
def check_coefficients(opts: SuiteOptions) -> List[VerificationReport]:
    """Automatic truncation keeps the norm; gamma = 0 gives the phase coherent state."""
    reports = []
    for e in opts.epsilons:
        for g in opts.gammas:
            def norm(g=g, e=e):
                params = set_gamma(params_from_alpha(2.5, e), g)
                return max(abs(coefficients(None, params, t).norm_squared() - 1.0) for t in opts.thetas)

            reports.append(_cell("gpcs.coefficient_norm", {"gamma": g, "eps": e}, opts.tol(1e-11), norm))

        def collapse(e=e):
            params = set_gamma(params_from_alpha(2.5, e), 0.0)
            worst = 0.0
            for t in opts.thetas:
                c = coefficients(opts.n_max, params, t, tail_tol=math.inf, normalization_route="closed").coeffs
                worst = max(worst, float(np.max(np.abs(c - phase_coherent_state(math.exp(-0.5 * e), t, opts.n_max)))))
            return worst

        reports.append(_cell("gpcs.pcs_collapse", {"eps": e, "n_max": opts.n_max}, opts.tol(1e-12), collapse))
    return reports


@check("gpcs")
def check_wavefunction_routes(opts: SuiteOptions) -> List[VerificationReport]:
    """Coupled closed form against the basis expansion on x in [0.1, 6]."""
    x = np.linspace(0.1, 6.0, 25)
    reports = []
    for g in opts.gammas:
        for e in opts.epsilons:
            def compute(g=g, e=e):
                worst = 0.0
                for t in opts.thetas:
                    closed = state_closed(g, e, t, x)
                    series = state_series(g, g + 1.0, e, t, x, strict=False)
                    worst = max(worst, _sup_rel(closed, series))
                return worst

            reports.append(_cell("gpcs.closed_vs_series", {"gamma": g, "eps": e}, opts.tol(1e-8), compute))
    return reports


@check("gpcs")
def check_state_norm(opts: SuiteOptions) -> List[VerificationReport]:
    reports = []
    for g in opts.gammas:
        for e in opts.epsilons:
            for route in ("closed", "series"):
                def compute(g=g, e=e, route=route):
                    return max(
                        abs(state_norm_value(g, g + 1.0, e, t, route=route, strict=False) - 1.0) for t in opts.thetas
                    )

                reports.append(_cell("gpcs.state_norm", {"gamma": g, "eps": e, "route": route}, opts.tol(1e-8), compute))
    return reports

# ==================== IDENTITY ====================

def _bump(x: np.ndarray) -> np.ndarray:
    return x * x * np.exp(-(x - 2.0) ** 2)


@check("identity")
def check_identity_kernel(opts: SuiteOptions) -> List[VerificationReport]:
    """Closed kernel G against the 60-term eigen-expansion at eps = 0.5."""
    pairs = [(0.5, 1.0), (1.0, 1.0), (1.5, 2.5), (2.0, 0.7), (3.0, 3.0)]
    reports = []
    for alpha in opts.alphas:
        def compute(alpha=alpha):
            return max(
                abs(kernel_G(0.5, alpha, u, v) - kernel_series(0.5, alpha, u, v)) / max(1.0, abs(kernel_G(0.5, alpha, u, v)))
                for u, v in pairs
            )

        reports.append(_cell("identity.kernel_series", {"alpha": alpha, "eps": 0.5}, opts.tol(1e-10), compute))
    return reports


@check("identity")
def check_eigen_action(opts: SuiteOptions) -> List[VerificationReport]:
    """O_eps psi_m = e^{-m eps} psi_m by kernel quadrature, m <= 10, sup over x in [0.05, 8]."""
    rule = half_line_rule(601)
    window = (rule.nodes >= 0.05) & (rule.nodes <= 8.0)
    reports = []
    for alpha in opts.alphas:
        for e in (0.1, 0.5):
            def compute(alpha=alpha, e=e):
                g = kernel_matrix(e, alpha, rule.nodes)
                psi = eigenfunctions(10, alpha, rule.nodes)
                image = psi @ (g * rule.weights[None, :]).T
                worst = 0.0
                for m in range(11):
                    target = math.exp(-m * e) * psi[m]
                    err = np.max(np.abs(image[m] - target)[window]) / np.max(np.abs(psi[m])[window])
                    worst = max(worst, float(err))
                return worst

            reports.append(_cell("identity.eigen_action", {"alpha": alpha, "eps": e}, opts.tol(1e-7), compute))
    return reports


@check("identity")
def check_operator_properties(opts: SuiteOptions) -> List[VerificationReport]:
    rule = half_line_rule(401)
    alpha = 2.5
    phi = GridFunction.from_callable(_bump, rule)
    chi = GridFunction.from_callable(lambda x: x ** 3 * np.exp(-x * x) * (1.0 + 0.5j * x), rule)
    reports = []
    for e in (0.2, 0.5):
        def equivalence(e=e):
            kernel = apply_O_kernel(e, alpha, phi).output.values
            basis = apply_O_basis(e, alpha, phi).output.values
            return _sup_rel(basis, kernel)

        reports.append(_cell("identity.route_equivalence", {"alpha": alpha, "eps": e}, opts.tol(1e-7), equivalence))

    def adjoint():
        return self_adjointness_defect(0.5, alpha, phi, chi) / (phi.l2_norm() * chi.l2_norm())

    def positivity():
        return max(0.0, -min_damping_eigenvalue(0.5, alpha, rule))

    reports.append(_cell("identity.self_adjoint", {"alpha": alpha, "eps": 0.5}, opts.tol(1e-9), adjoint))
    reports.append(_cell("identity.positivity", {"alpha": alpha, "eps": 0.5}, opts.tol(1e-10), positivity))
    return reports


@check("identity")
def check_convergence(opts: SuiteOptions) -> List[VerificationReport]:
    rule = half_line_rule(601)
    phi = GridFunction.from_callable(lambda x: np.exp(-(x - 2.0) ** 2), rule)
    try:
        return convergence_report(2.5, phi, [0.8, 0.4, 0.2, 0.1])
    except GPCSError as e:
        log.warning(f"identity.convergence: {e}")
        return [VerificationReport(
            check="identity.convergence", params={"alpha": 2.5}, error=math.inf, tol=0.0, passed=False,
            detail=f"{type(e).__name__}: {e}",
        )]


@check("identity")
def check_theta_block(opts: SuiteOptions) -> List[VerificationReport]:
    """gamma = 0 theta-integral of the coefficient products on a 1024-node trapezoid."""
    def compute():
        block = resolve_identity_block(0.0, 0.5, 6, rule=circle_rule(1024))
        return float(np.max(np.abs(block - np.diag(np.exp(-0.5 * np.arange(6))))))

    return [_cell("identity.theta_block", {"gamma": 0.0, "eps": 0.5, "block": 6}, opts.tol(1e-8), compute)]

# ==================== TRANSFORM ====================

@check("transform")
def check_kappa(opts: SuiteOptions) -> List[VerificationReport]:
    rng = np.random.default_rng(opts.seed + 4)
    taus = rng.uniform(0.05, 0.95, 100)
    thetas = rng.uniform(0.0, 2.0 * math.pi, 100)
    gammas = rng.uniform(0.0, 3.0, 100)

    def compute():
        return max(max(kappa_identities(t, th, g)) for t, th, g in zip(taus, thetas, gammas))

    return [_cell("transform.kappa_identities", {"points": 100}, opts.tol(1e-12), compute)]


@check("transform")
def check_integral_identity(opts: SuiteOptions) -> List[VerificationReport]:
    """Half-line quadrature of sqrt(N) <x|theta> psi_n against the analytic Q_n, n <= 8."""
    thetas = (0.5, math.pi / 2, math.pi, 5.0)
    reports = []
    for g in opts.gammas:
        for e in (0.1, 0.5):
            def compute(g=g, e=e):
                worst = 0.0
                for t in thetas:
                    quad = q_epsilon_quadrature_all(8, g, e, t)
                    exact = np.array([q_epsilon_analytic(n, g, e, t) for n in range(9)])
                    worst = max(worst, float(np.max(np.abs(quad - exact) / (1.0 + np.abs(exact)))))
                return worst

            reports.append(_cell("transform.quadrature_vs_analytic", {"gamma": g, "eps": e}, opts.tol(1e-8), compute))
    return reports


@check("transform")
def check_laguerre_integral(opts: SuiteOptions) -> List[VerificationReport]:
    reports = []
    for g in (0.5, 1.5):
        for e in (0.2, 0.5):
            def compute(g=g, e=e):
                worst = 0.0
                for t in (0.7, 2.5):
                    for n in range(5):
                        closed = laguerre_confluent_integral(n, g, e, t, route="closed")
                        quad = laguerre_confluent_integral(n, g, e, t, route="quadrature")
                        worst = max(worst, abs(quad - closed) / max(abs(closed), 1e-300))
                return worst

            reports.append(_cell("transform.laguerre_integral", {"gamma": g, "eps": e}, opts.tol(1e-8), compute))
    return reports


@check("transform")
def check_endpoint(opts: SuiteOptions) -> List[VerificationReport]:
    """Images of the eigenstates: eps -> 0 limit and the e^{-n eps/2} law."""
    grid = np.linspace(0.0, 2.0 * math.pi, 256, endpoint=False)
    reports = []
    for g in opts.gammas:
        def images(g=g):
            worst = 0.0
            for n in range(opts.n_max + 1):
                ours = transform_eigenstate(n, g, grid).values
                ref = np.array([q_epsilon_analytic(n, g, 0.0, t) for t in grid])
                if g == 0.0:
                    ref = np.exp(1j * n * grid)
                worst = max(worst, float(np.max(np.abs(ours - ref) / np.maximum(1.0, np.abs(ref)))))
            return worst

        def decay(g=g):
            worst = 0.0
            for n in range(opts.n_max + 1):
                for t in opts.thetas:
                    limit = q_epsilon_analytic(n, g, 0.0, t)
                    if abs(limit) < 1e-8:
                        continue
                    for e in opts.epsilons:
                        ratio = q_epsilon_analytic(n, g, e, t) / limit
                        worst = max(worst, abs(ratio - math.exp(-0.5 * n * e)))
            return worst

        def norms(g=g):
            rule = default_circle_rule(g)
            return max(
                abs(weighted_integral(g, rule, np.abs(transform_eigenstate(n, g, rule.nodes).values) ** 2) - 1.0)
                for n in range(opts.n_max + 1)
            )

        tol = 1e-12 if g == 0.0 else 1e-10
        reports.append(_cell("transform.endpoint", {"gamma": g, "grid": 256}, opts.tol(tol), images))
        reports.append(_cell("transform.decay_law", {"gamma": g}, opts.tol(1e-13), decay))
        reports.append(_cell("transform.image_norm", {"gamma": g}, opts.tol(1e-9), norms))
    return reports


@check("transform")
def check_function_transform(opts: SuiteOptions) -> List[VerificationReport]:
    """Quadrature + extrapolation on a grid function reproduces an eigenstate image."""
    rule = half_line_rule(801, scale=math.sqrt(2.0))
    grid = np.array([0.5, 2.0, 4.0])
    reports = []
    for g, n in ((0.5, 1), (1.5, 2)):
        def compute(g=g, n=n):
            phi = GridFunction(
                domain="half_line", nodes=rule.nodes, values=eigenfunctions(n, g + 1.0, rule.nodes, strict=False)[n],
                rule=rule,
            )
            result = transform_function(phi, g, grid, route="quadrature+extrapolation")
            return float(np.max(np.abs(result.values - transform_eigenstate(n, g, grid).values)))

        reports.append(_cell("transform.function_extrapolation", {"gamma": g, "n": n}, opts.tol(1e-6), compute))
    return reports

# ==================== RUNNER ====================

def suite_names() -> List[str]:
    return SUITE_ORDER + ["all"]


def run_suite(name: str, options: Optional[SuiteOptions] = None) -> List[VerificationReport]:
    """Run one suite (or "all") and return every report in order."""
    if name not in suite_names():
        raise ConfigError(f"Unknown suite '{name}'. Available: {', '.join(suite_names())}")
    options = options or SuiteOptions()
    names: Sequence[str] = SUITE_ORDER if name == "all" else [name]
    reports: List[VerificationReport] = []
    for suite in names:
        for fn in SUITES[suite]:
            batch = fn(options)
            failed = sum(1 for r in batch if not r.passed)
            log.info(f"{suite}.{fn.__name__}: {len(batch) - failed}/{len(batch)} passed")
            reports.extend(batch)
    return reports


def summarize(reports: Sequence[VerificationReport]) -> Dict[str, int]:
    passed = sum(1 for r in reports if r.passed)
    return {"total": len(reports), "passed": passed, "failed": len(reports) - passed}


__all__ = ["SuiteOptions", "SUITES", "SUITE_ORDER", "check", "suite_names", "run_suite", "summarize"]
