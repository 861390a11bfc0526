import math

import numpy as np
import pytest

from infrastructure import DomainError, GridFunction
from identity_operator import (
    apply_O,
    apply_O_basis,
    apply_O_kernel,
    convergence_report,
    kernel_bandwidth,
    kernel_G,
    kernel_matrix,
    kernel_series,
    min_damping_eigenvalue,
    resolution_warning,
    resolve_identity_block,
    self_adjointness_defect,
)
from pho_basis import eigenfunctions
from quadrature import circle_jacobi_rule, circle_rule, half_line_rule


def _bump(x):
    return x * x * np.exp(-(x - 2.0) ** 2)


def _eigen_grid(rule, m, alpha):
    return GridFunction.from_callable(lambda x: eigenfunctions(m, alpha, x)[m], rule)


class TestKernel:
    @pytest.mark.parametrize("u,v", [(1.0, 1.3), (0.4, 2.2), (3.0, 3.0)])
    def test_closed_form_matches_series(self, u, v):
        assert kernel_G(0.5, 2.5, u, v) == pytest.approx(kernel_series(0.5, 2.5, u, v), rel=1e-10)

    def test_symmetric_and_vanishing_at_origin(self):
        u = np.array([0.3, 1.0, 2.5])
        g = kernel_matrix(0.3, 3.5, u)
        np.testing.assert_allclose(g, g.T, rtol=1e-13)
        assert kernel_G(0.3, 3.5, 0.0, 1.0) == 0.0
        assert kernel_series(0.3, 3.5, 0.0, 1.0) == 0.0

    def test_domain(self):
        with pytest.raises(DomainError):
            kernel_G(0.0, 2.5, 1.0, 1.0)
        with pytest.raises(DomainError):
            kernel_G(0.5, 1.5, 1.0, 1.0)
        with pytest.raises(DomainError):
            kernel_G(0.5, 2.5, -1.0, 1.0)

    def test_bandwidth_warning(self):
        assert kernel_bandwidth(0.5) == pytest.approx(math.sqrt(2.0 * (1.0 - math.exp(-0.5)) / (1.0 + math.exp(-0.5))))
        assert resolution_warning(0.5, half_line_rule(401)) is None
        assert "bandwidth" in resolution_warning(0.05, half_line_rule(16))


class TestApplication:
    def test_basis_route_damps_eigenstates(self, half_line):
        phi = _eigen_grid(half_line, 3, 2.5)
        out = apply_O_basis(0.5, 2.5, phi)
        assert out.route == "basis_expansion"
        np.testing.assert_allclose(out.output.values, math.exp(-1.5) * phi.values, atol=1e-10)

    def test_basis_route_reports_lost_norm(self, half_line):
        phi = _eigen_grid(half_line, 10, 2.5)
        out = apply_O_basis(0.5, 2.5, phi, n_max=4)
        assert out.warnings and "keeps" in out.warnings[0]

    @pytest.mark.parametrize("m", [0, 2, 5])
    def test_kernel_route_damps_eigenstates(self, coarse_half_line, m):
        phi = _eigen_grid(coarse_half_line, m, 2.5)
        out = apply_O_kernel(0.5, 2.5, phi)
        window = (coarse_half_line.nodes > 0.05) & (coarse_half_line.nodes < 8.0)
        err = np.abs(out.output.values - math.exp(-0.5 * m) * phi.values)[window]
        assert float(np.max(err)) < 1e-7

    def test_routes_agree(self, coarse_half_line):
        phi = GridFunction.from_callable(_bump, coarse_half_line)
        kernel = apply_O(0.5, 2.5, phi).output.values
        basis = apply_O(0.5, 2.5, phi, route="basis_expansion").output.values
        assert float(np.max(np.abs(kernel - basis))) < 1e-7

    def test_auto_route_below_kernel_floor(self, coarse_half_line):
        phi = GridFunction.from_callable(_bump, coarse_half_line)
        assert apply_O(0.01, 2.5, phi).route == "basis_expansion"
        with pytest.raises(DomainError):
            apply_O_kernel(0.01, 2.5, phi)

    def test_rejects_circle_functions(self):
        rule = circle_rule(16)
        phi = GridFunction.from_callable(np.cos, rule)
        with pytest.raises(DomainError):
            apply_O_basis(0.5, 2.5, phi)
        with pytest.raises(DomainError):
            apply_O_kernel(0.5, 2.5, phi)


class TestOperatorProperties:
    def test_self_adjoint(self, coarse_half_line):
        phi = GridFunction.from_callable(_bump, coarse_half_line)
        chi = GridFunction.from_callable(lambda x: x ** 3 * np.exp(-x * x / 2.0) * (1.0 + 0.5j * x), coarse_half_line)
        assert self_adjointness_defect(0.3, 2.5, phi, chi) < 1e-10

    def test_positive(self):
        assert min_damping_eigenvalue(0.5, 2.5, half_line_rule(201)) > -1e-10

    @pytest.mark.slow
    def test_convergence_is_monotone(self, coarse_half_line):
        phi = GridFunction.from_callable(_bump, coarse_half_line)
        reports = convergence_report(2.5, phi, [0.8, 0.4, 0.2, 0.1])
        assert len(reports) == 5
        assert all(r.passed for r in reports)
        errors = [r.error for r in reports[:-1]]
        assert errors == sorted(errors, reverse=True)
        assert reports[-1].params["rate"] > 0.5

    def test_eigenstate_residual_is_exact(self, half_line):
        # O_eps psi_3 = e^{-3 eps} psi_3, so the residual is (1 - e^{-3 eps}) ||psi_3||
        phi = _eigen_grid(half_line, 3, 2.5)
        schedule = [0.04, 0.02, 0.01, 0.005]
        reports = convergence_report(2.5, phi, schedule)
        assert all(r.passed for r in reports)
        for r, eps in zip(reports[:-1], schedule):
            assert r.params["route"] == "basis_expansion"
            assert r.error == pytest.approx(-math.expm1(-3.0 * eps) * phi.l2_norm(), rel=1e-8)
        assert reports[-1].params["rate"] == pytest.approx(1.0, abs=0.05)

    def test_schedule_must_decrease(self, coarse_half_line):
        phi = GridFunction.from_callable(_bump, coarse_half_line)
        with pytest.raises(DomainError):
            convergence_report(2.5, phi, [0.2, 0.4])
        with pytest.raises(DomainError):
            convergence_report(2.5, phi, [0.2])


class TestThetaBlock:
    @pytest.mark.parametrize("gamma", [0.0, 1.5])
    def test_block_is_damped_identity(self, gamma):
        eps = 0.5
        block = resolve_identity_block(gamma, eps, 6, circle_jacobi_rule(256, gamma))
        np.testing.assert_allclose(block, np.diag(np.exp(-eps * np.arange(6))), atol=1e-9)

    def test_block_size(self):
        with pytest.raises(DomainError):
            resolve_identity_block(1.5, 0.5, 0)
