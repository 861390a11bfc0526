import logging
import math
import warnings

import numpy as np
import pytest
from pydantic import ValidationError

from infrastructure import (
    ConvergenceError,
    DomainError,
    GPCSError,
    GPCSSettings,
    GridFunction,
    ModelParams,
    QuadratureRule,
    RunConfig,
    VerificationReport,
    ensure_parent,
    go_quiet,
    parallel_map,
    settings,
)


def test_default_floors():
    assert settings.epsilon_floor("closed") == 1e-3
    assert settings.epsilon_floor("series") == 1e-4
    assert settings.epsilon_floor("kernel") == 0.05
    with pytest.raises(ValueError):
        settings.epsilon_floor("spectral")


def test_check_epsilon():
    settings.check_epsilon(0.5, "kernel")
    with pytest.raises(DomainError, match="below the closed floor"):
        settings.check_epsilon(5e-4, "closed")
    with pytest.raises(DomainError):
        settings.check_epsilon(0.0, "series")
    with pytest.raises(DomainError):
        settings.check_epsilon(float("nan"), "series")


def test_env_override(monkeypatch):
    monkeypatch.setenv("GPCS_THREADS", "3")
    monkeypatch.setenv("GPCS_KERNEL_EPS_FLOOR", "0.1")
    fresh = GPCSSettings()
    assert fresh.THREADS == 3
    assert fresh.get_threads() == 3
    assert fresh.get_threads(0) == 1
    assert fresh.epsilon_floor("kernel") == 0.1


def test_error_hierarchy():
    assert issubclass(DomainError, ValueError)
    assert issubclass(ConvergenceError, GPCSError)
    err = ConvergenceError("too short", terms_used=40, suggested=120)
    assert err.suggested == 120 and err.terms_used == 40


def test_model_params_alpha_consistency():
    p = ModelParams(a=0.75, alpha=2.0, epsilon=0.5)
    assert p.gamma is None
    with pytest.raises(ValidationError):
        ModelParams(a=0.75, alpha=2.1, epsilon=0.5)
    with pytest.raises(ValidationError):
        ModelParams(a=0.75, alpha=2.0, epsilon=0.0)
    with pytest.raises(DomainError):
        p.require_gamma()


def test_model_params_coupling():
    ModelParams(a=0.75, alpha=2.0, epsilon=0.5, gamma=1.0, coupled=True)
    with pytest.raises(ValidationError):
        ModelParams(a=0.75, alpha=2.0, epsilon=0.5, gamma=0.5, coupled=True)


def test_quadrature_rule_validation():
    with pytest.raises(ValidationError):
        QuadratureRule(domain="half_line", nodes=[0.5, 1.0], weights=[1.0, -1.0], order_hint=1)
    with pytest.raises(ValidationError):
        QuadratureRule(domain="half_line", nodes=[1.0, 0.5], weights=[1.0, 1.0], order_hint=1)
    with pytest.raises(ValidationError):
        QuadratureRule(domain="circle", nodes=[1.0, 7.0], weights=[1.0, 1.0], order_hint=1)
    rule = QuadratureRule(domain="circle", nodes=[1.0, 2.0], weights=[1.0, 1.0], order_hint=1)
    assert rule.size == 2
    with pytest.raises(ValueError):
        rule.nodes[0] = 3.0


def test_grid_function_rejects_non_finite(coarse_half_line):
    values = np.exp(-coarse_half_line.nodes ** 2)
    f = GridFunction(domain="half_line", nodes=coarse_half_line.nodes, values=values, rule=coarse_half_line)
    assert f.l2_norm() == pytest.approx(math.sqrt(math.sqrt(math.pi / 2.0) / 2.0), rel=1e-12)
    values[3] = np.nan
    with pytest.raises(ValidationError, match="non-finite value at node 3"):
        f.with_values(values)


def test_report_uses_pass_alias():
    report = VerificationReport(check="demo", error=1e-15, tol=1e-12, **{"pass": True})
    assert report.passed
    line = report.to_json_line()
    assert '"pass":true' in line
    assert '"passed"' not in line


def test_run_config_validation():
    cfg = RunConfig(command="eval-state", gamma=1.5, eps=0.5, theta=1.0)
    assert cfg.points == 121 and cfg.format == "csv"
    with pytest.raises(ValidationError):
        RunConfig(command="eval-state", x_min=3.0, x_max=2.0)
    with pytest.raises(ValidationError):
        RunConfig(command="transform", gamma=1.0, alpha=3.0)
    with pytest.raises(ValidationError):
        RunConfig(command="spectrum", a=0.75, alpha=2.5)
    with pytest.raises(ValidationError):
        RunConfig(command="gram", colour="red")


def test_parallel_map_keeps_order():
    items = list(range(12))
    assert parallel_map(math.factorial, items, max_workers=1) == [math.factorial(k) for k in items]
    assert parallel_map(math.factorial, items, max_workers=2) == [math.factorial(k) for k in items]


def test_go_quiet_returns_app_logger():
    logger = go_quiet("WARNING")
    assert logger.name == "gpcs"
    assert logger.level == logging.WARNING


def test_go_quiet_leaves_floating_point_warnings_on():
    go_quiet("WARNING")
    assert not any(f[0] == "ignore" and f[2] is RuntimeWarning for f in warnings.filters)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("default")
        np.log(np.zeros(1))
    assert any(issubclass(w.category, RuntimeWarning) for w in caught)


def test_ensure_parent(tmp_path):
    target = ensure_parent(tmp_path / "runs" / "a" / "out.csv")
    assert target.parent.is_dir()
