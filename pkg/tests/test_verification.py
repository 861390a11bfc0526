import json
import math

import pytest

from infrastructure import ConfigError, DomainError
from verification import SUITE_ORDER, SUITES, SuiteOptions, _cell, run_suite, suite_names, summarize


def test_every_suite_has_checks():
    assert suite_names() == SUITE_ORDER + ["all"]
    for name in SUITE_ORDER:
        assert SUITES[name], name


def test_narrowed_grids():
    opts = SuiteOptions().narrowed(gamma=1.5, epsilon=0.2, n_max=4)
    assert opts.gammas == [1.5] and opts.epsilons == [0.2] and opts.n_max == 4
    assert len(opts.thetas) == 5
    assert SuiteOptions(tol_scale=10.0).tol(1e-9) == pytest.approx(1e-8)


def test_unknown_suite():
    with pytest.raises(ConfigError, match="Unknown suite"):
        run_suite("spectral")


def test_failures_become_reports():
    def boom():
        raise DomainError("epsilon below floor")

    report = _cell("demo.check", {"eps": 1e-5}, 1e-9, boom)
    assert not report.passed
    assert math.isinf(report.error)
    assert "DomainError" in report.detail
    assert json.loads(report.to_json_line())["pass"] is False


def test_summarize():
    reports = [_cell("a", {}, 1.0, lambda: 0.5), _cell("b", {}, 1.0, lambda: 2.0)]
    assert summarize(reports) == {"total": 2, "passed": 1, "failed": 1}


@pytest.mark.parametrize("suite", ["specfun", "cjacobi"])
def test_cheap_suites_pass(suite):
    reports = run_suite(suite, SuiteOptions().narrowed(gamma=1.5))
    failed = [r.check for r in reports if not r.passed]
    assert reports and not failed


def test_pho_suite_passes():
    reports = run_suite("pho", SuiteOptions().narrowed(alpha=2.5, n_max=8))
    assert all(r.passed for r in reports)


@pytest.mark.slow
@pytest.mark.parametrize("suite", ["gpcs", "identity", "transform"])
def test_narrowed_suites_pass(suite):
    opts = SuiteOptions().narrowed(gamma=1.5, epsilon=0.5, theta=math.pi / 2, alpha=2.5, n_max=6)
    reports = run_suite(suite, opts)
    failed = [(r.check, r.params, r.error, r.tol) for r in reports if not r.passed]
    assert reports and not failed
