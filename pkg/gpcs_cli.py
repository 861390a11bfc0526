#!/usr/bin/env python3
"""
Command-line front end.

    eval-state   wavefunction table on an x-grid (series route, closed-route difference when coupled)
    transform    coherent-state transform of an eigenstate on a theta-grid
    spectrum     PHO and molecular eigenvalues
    gram         circular Jacobi Gram matrix
    verify       run a verification suite, JSON lines out

Flags override values from the optional YAML file given with --config.
Exit codes: 0 ok, 1 verification or numerical failure, 2 usage or validation error.
"""

import json
import math
import logging
import sys
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd
import typer
import yaml
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from infrastructure import (
    ConfigError,
    DomainError,
    GPCSError,
    MolecularParams,
    RunConfig,
    ensure_parent,
    go_quiet,
)
from circular_jacobi import gram_matrix, squared_norm
from cs_transform import q_epsilon_analytic, q_epsilon_quadrature, transform_eigenstate
from pho_basis import alpha_from_a, eigenvalue, eigenvalue_molecular, molecular_to_a
from phase_states import state_closed, state_series
from verification import SUITES, SuiteOptions, run_suite, suite_names, summarize

log = logging.getLogger("gpcs.cli")

app = typer.Typer(
    help="Generalized phase coherent states of the pseudoharmonic oscillator.",
    add_completion=False,
    no_args_is_help=True,
)
console = Console(stderr=True)

STATE_COLUMNS = ["theta_or_x", "re", "im", "abs2", "route_diff"]

# ==================== CONFIG ====================

def load_config_file(path: Optional[Path]) -> Dict[str, Any]:
    """Read flag defaults from YAML; keys may use dashes or underscores."""
    if path is None:
        return {}
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    except yaml.YAMLError as e:
        raise ConfigError(f"YAML parsing error in {path}: {e}")
    if not isinstance(raw, dict):
        raise ConfigError(f"{path} must hold a mapping of flag names to values")
    return {str(k).replace("-", "_"): v for k, v in raw.items()}


def build_config(ctx: typer.Context, command: str, **flags: Any) -> RunConfig:
    """Merge file values under explicit flags and validate."""
    file_values = (ctx.obj or {}).get("file", {})
    merged = {**file_values, **{k: v for k, v in flags.items() if v is not None}, "command": command}
    try:
        return RunConfig(**merged)
    except ValidationError as e:
        problems = "; ".join(f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}" for err in e.errors())
        raise ConfigError(problems)


def _require(cfg: RunConfig, *names: str) -> None:
    missing = [n for n in names if getattr(cfg, n) is None]
    if missing:
        raise ConfigError(f"{cfg.command} needs {', '.join('--' + m.replace('_', '-') for m in missing)}")


def _resolve_alpha(cfg: RunConfig) -> Optional[float]:
    if cfg.alpha is not None:
        return cfg.alpha
    if cfg.a is not None:
        return alpha_from_a(cfg.a)
    return None

# ==================== OUTPUT ====================

def write_table(df: pd.DataFrame, cfg: RunConfig) -> None:
    """CSV with 17 significant digits or JSON records; stdout unless --out is set."""
    if cfg.format == "csv":
        text = df.to_csv(index=False, float_format="%.17g", na_rep="", lineterminator="\n")
    else:
        records = df.astype(object).where(df.notna(), None).to_dict(orient="records")
        text = json.dumps(records, indent=1, allow_nan=False) + "\n"
    if cfg.out is None:
        sys.stdout.write(text)
        return
    path = ensure_parent(cfg.out)
    path.write_text(text, encoding="utf-8")
    console.print(f"[green]wrote[/green] {path} ({len(df)} rows)")


def _fail(e: GPCSError) -> None:
    """Report an error and exit 2 for bad input, 1 for numerical failure."""
    code = 2 if isinstance(e, (ConfigError, DomainError)) else 1
    console.print(f"[bold red]{type(e).__name__}:[/bold red] {e}")
    raise typer.Exit(code=code)

# ==================== COMMANDS ====================

@app.callback()
def main(
    ctx: typer.Context,
    config: Optional[Path] = typer.Option(None, "--config", help="YAML file with default flag values"),
    log_level: Optional[str] = typer.Option(None, "--log-level", help="Overrides GPCS_LOG_LEVEL"),
):
    go_quiet(log_level)
    try:
        ctx.obj = {"file": load_config_file(config)}
    except ConfigError as e:
        _fail(e)


@app.command("eval-state")
def eval_state(
    ctx: typer.Context,
    gamma: Optional[float] = typer.Option(None, help="Circular Jacobi charge"),
    a: Optional[float] = typer.Option(None, help="Singular coupling a (alternative to --alpha)"),
    alpha: Optional[float] = typer.Option(None, help="Basis index; omitted means coupled alpha = gamma + 1"),
    eps: Optional[float] = typer.Option(None, help="Regularization epsilon"),
    theta: Optional[float] = typer.Option(None, help="Circle angle"),
    x_min: Optional[float] = typer.Option(None),
    x_max: Optional[float] = typer.Option(None),
    points: Optional[int] = typer.Option(None),
    tol: Optional[float] = typer.Option(None, help="Pointwise series tolerance"),
    out: Optional[Path] = typer.Option(None),
    format: Optional[str] = typer.Option(None, help="csv or json"),
):
    """Wavefunction table; route_diff compares against the closed form in the coupled regime."""
    try:
        cfg = build_config(
            ctx, "eval-state", gamma=gamma, a=a, alpha=alpha, eps=eps, theta=theta, x_min=x_min,
            x_max=x_max, points=points, tol=tol, out=out, format=format,
        )
        _require(cfg, "eps", "theta")
        basis_alpha = _resolve_alpha(cfg)
        g = cfg.gamma
        if g is None and basis_alpha is None:
            raise ConfigError("eval-state needs --gamma, or --alpha/--a for the coupled family")
        if g is None:
            g = basis_alpha - 1.0
        if basis_alpha is None:
            basis_alpha = g + 1.0
        coupled = math.isclose(basis_alpha, g + 1.0, rel_tol=0.0, abs_tol=1e-12)

        x = np.linspace(cfg.x_min, cfg.x_max, cfg.points)
        series = np.asarray(state_series(g, basis_alpha, cfg.eps, cfg.theta, x, tol=cfg.tol, strict=not coupled))
        diff = np.full(x.shape, np.nan)
        if coupled:
            closed = np.asarray(state_closed(g, cfg.eps, cfg.theta, x))
            diff = np.abs(series - closed)
            log.info(f"max |series - closed| = {float(np.max(diff)):.3e}")
        df = pd.DataFrame({
            "theta_or_x": x, "re": series.real, "im": series.imag, "abs2": np.abs(series) ** 2, "route_diff": diff,
        }, columns=STATE_COLUMNS)
        write_table(df, cfg)
    except GPCSError as e:
        _fail(e)


@app.command("transform")
def transform(
    ctx: typer.Context,
    gamma: Optional[float] = typer.Option(None),
    alpha: Optional[float] = typer.Option(None, help="Must equal gamma + 1 when given"),
    n: Optional[int] = typer.Option(None, help="Eigenstate index"),
    eps: Optional[float] = typer.Option(None, help="Use the eps-regularized quadrature instead of the limit"),
    points: Optional[int] = typer.Option(None, help="Theta-grid size on [0, 2pi)"),
    out: Optional[Path] = typer.Option(None),
    format: Optional[str] = typer.Option(None),
):
    """Image of |n; gamma+1> on a theta-grid with the 2F1 reference and their difference."""
    try:
        cfg = build_config(ctx, "transform", gamma=gamma, alpha=alpha, n=n, eps=eps, points=points, out=out, format=format)
        _require(cfg, "gamma", "n")
        grid = np.linspace(0.0, 2.0 * math.pi, cfg.points, endpoint=False)
        if cfg.eps is None:
            values = transform_eigenstate(cfg.n, cfg.gamma, grid).values
            reference = np.array([q_epsilon_analytic(cfg.n, cfg.gamma, 0.0, t) for t in grid])
        else:
            values = np.array([q_epsilon_quadrature(cfg.n, cfg.gamma, cfg.eps, t) for t in grid])
            reference = np.array([q_epsilon_analytic(cfg.n, cfg.gamma, cfg.eps, t) for t in grid])
        df = pd.DataFrame({
            "theta_or_x": grid, "re": values.real, "im": values.imag, "abs2": np.abs(values) ** 2,
            "route_diff": np.abs(values - reference),
        }, columns=STATE_COLUMNS)
        write_table(df, cfg)
    except GPCSError as e:
        _fail(e)


@app.command("spectrum")
def spectrum(
    ctx: typer.Context,
    a: Optional[float] = typer.Option(None),
    alpha: Optional[float] = typer.Option(None),
    rho: Optional[float] = typer.Option(None, help="Molecular force parameter"),
    kappa0: Optional[float] = typer.Option(None, help="Molecular bond length"),
    n_max: Optional[int] = typer.Option(None),
    out: Optional[Path] = typer.Option(None),
    format: Optional[str] = typer.Option(None),
):
    """lambda_n = 2(2n + alpha), with the molecular spectrum when rho and kappa0 are given."""
    try:
        cfg = build_config(ctx, "spectrum", a=a, alpha=alpha, rho=rho, kappa0=kappa0, n_max=n_max, out=out, format=format)
        molecular = None
        if (cfg.rho is None) != (cfg.kappa0 is None):
            raise ConfigError("spectrum needs both --rho and --kappa0 for the molecular column")
        if cfg.rho is not None:
            molecular = MolecularParams(rho=cfg.rho, kappa0=cfg.kappa0)
        basis_alpha = _resolve_alpha(cfg)
        if basis_alpha is None and molecular is not None:
            basis_alpha = alpha_from_a(molecular_to_a(molecular))
        if basis_alpha is None:
            raise ConfigError("spectrum needs --alpha, --a or --rho/--kappa0")
        ns = np.arange((12 if cfg.n_max is None else cfg.n_max) + 1)
        df = pd.DataFrame({
            "n": ns,
            "lambda": [eigenvalue(int(k), basis_alpha) for k in ns],
            "lambda_molecular": [eigenvalue_molecular(int(k), molecular) if molecular else np.nan for k in ns],
        })
        write_table(df, cfg)
    except GPCSError as e:
        _fail(e)


@app.command("gram")
def gram(
    ctx: typer.Context,
    gamma: Optional[float] = typer.Option(None),
    n_max: Optional[int] = typer.Option(None),
    out: Optional[Path] = typer.Option(None),
    format: Optional[str] = typer.Option(None),
):
    """Circular Jacobi Gram matrix against Omega_gamma, entry by entry."""
    try:
        cfg = build_config(ctx, "gram", gamma=gamma, n_max=n_max, out=out, format=format)
        _require(cfg, "gamma")
        size = 15 if cfg.n_max is None else cfg.n_max
        matrix = gram_matrix(size, cfg.gamma)
        rows = []
        for i in range(size + 1):
            for j in range(size + 1):
                expected = squared_norm(i, cfg.gamma) if i == j else 0.0
                rows.append({
                    "n": i, "m": j, "re": matrix[i, j].real, "im": matrix[i, j].imag,
                    "expected": expected, "diff": abs(matrix[i, j] - expected),
                })
        write_table(pd.DataFrame(rows), cfg)
    except GPCSError as e:
        _fail(e)


@app.command("verify")
def verify(
    ctx: typer.Context,
    suite: Optional[str] = typer.Argument(None, help="specfun, pho, cjacobi, gpcs, identity, transform or all"),
    list_checks: bool = typer.Option(False, "--list", help="List suites and their checks"),
    gamma: Optional[float] = typer.Option(None, help="Restrict the gamma grid"),
    alpha: Optional[float] = typer.Option(None, help="Restrict the alpha grid"),
    eps: Optional[float] = typer.Option(None, help="Restrict the epsilon grid"),
    theta: Optional[float] = typer.Option(None, help="Restrict the theta grid"),
    n_max: Optional[int] = typer.Option(None),
    out: Optional[Path] = typer.Option(None, help="JSON-lines report file (default stdout)"),
):
    """Run a verification suite; exit 1 when any check fails."""
    if list_checks:
        for name in suite_names()[:-1]:
            console.print(f"[bold]{name}[/bold]: " + ", ".join(fn.__name__ for fn in SUITES[name]))
        raise typer.Exit()
    try:
        cfg = build_config(
            ctx, "verify", suite=suite, gamma=gamma, alpha=alpha, eps=eps, theta=theta, n_max=n_max, out=out,
        )
        options = SuiteOptions().narrowed(
            gamma=cfg.gamma, epsilon=cfg.eps, theta=cfg.theta, alpha=cfg.alpha, n_max=cfg.n_max,
        )
        reports = run_suite(cfg.suite or "all", options)
    except GPCSError as e:
        _fail(e)
        return

    lines = "".join(r.to_json_line() + "\n" for r in reports)
    if cfg.out is None:
        sys.stdout.write(lines)
    else:
        ensure_parent(cfg.out).write_text(lines, encoding="utf-8")

    table = Table(title=f"verify {cfg.suite or 'all'}")
    table.add_column("check")
    table.add_column("passed", justify="right")
    table.add_column("worst error / tol", justify="right")
    by_check: Dict[str, list] = {}
    for r in reports:
        by_check.setdefault(r.check, []).append(r)
    for name, group in by_check.items():
        ok = sum(1 for r in group if r.passed)
        ratio = max((r.error / r.tol if r.tol > 0 else (0.0 if r.passed else math.inf)) for r in group)
        style = "green" if ok == len(group) else "red"
        table.add_row(name, f"[{style}]{ok}/{len(group)}[/{style}]", f"{ratio:.2e}")
    console.print(table)

    counts = summarize(reports)
    console.print(f"SUMMARY: {counts['passed']}/{counts['total']} checks passed")
    if counts["failed"]:
        raise typer.Exit(code=1)


if __name__ == "__main__":
    app()
