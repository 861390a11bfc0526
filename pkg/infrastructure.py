"""
Consolidated infrastructure module for the GPCS toolkit.
Contains configuration, schemas, exceptions, telemetry and the worker pool.
"""

import os
import sys
import math
import logging
from concurrent.futures import ProcessPoolExecutor, as_completed
from pathlib import Path
from typing import Any, Callable, Dict, List, Literal, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_serializer, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

# ==================== CONFIGURATION ====================

class GPCSSettings(BaseSettings):
    """Centralized numerical configuration, overridable through GPCS_* variables or .env."""

    model_config = SettingsConfigDict(env_prefix="GPCS_", env_file=".env", extra="ignore")

    # Execution
    THREADS: int = 1
    LOG_LEVEL: str = "ERROR"

    # Series engines
    SERIES_TOL: float = 2.2e-16
    MAX_SERIES_TERMS: int = 500
    MAX_NORMALIZATION_TERMS: int = 2_000_000   # normalization series; ~ 7e5 needed at eps = 1e-4
    MAX_EXPANSION_TERMS: int = 60000         # coefficient vectors and basis expansions
    HYP1F1_REL_TARGET: float = 1e-12         # accuracy every 1F1 route must certify
    HYP1F1_SERIES_RADIUS: float = 40.0   # Z0: Taylor series up to |z| = Z0
    BESSEL_SWITCH: float = 30.0          # X0: power series up to x = X0

    # Regularization floors
    CLOSED_FORM_EPS_FLOOR: float = 1e-3
    SERIES_EPS_FLOOR: float = 1e-4
    KERNEL_EPS_FLOOR: float = 0.05

    # Truncation and quadrature defaults
    COEFFICIENT_TAIL: float = 1e-12
    HALF_LINE_NODES: int = 801
    HALF_LINE_SPAN: float = 12.0
    CIRCLE_NODES: int = 512
    RICHARDSON_SCHEDULE: List[float] = Field(default_factory=lambda: [0.4, 0.2, 0.1, 0.05])

    def get_threads(self, override: Optional[int] = None) -> int:
        """
        Get the worker cap for grid evaluation with optional per-call override.

        Args:
            override: Per-call override. If None, uses GPCS_THREADS.

        Returns:
            int: Number of workers (1 means serial)
        """
        if override is not None:
            return max(1, int(override))
        return max(1, self.THREADS)

    def epsilon_floor(self, route: str) -> float:
        """Smallest supported regularization for a route ("closed", "series" or "kernel")."""
        floors = {
            "closed": self.CLOSED_FORM_EPS_FLOOR,
            "series": self.SERIES_EPS_FLOOR,
            "kernel": self.KERNEL_EPS_FLOOR,
        }
        if route not in floors:
            raise ValueError(f"Unknown route for epsilon floor: {route}")
        return floors[route]

    def check_epsilon(self, epsilon: float, route: str) -> None:
        """Raise DomainError when epsilon is below the floor of a route."""
        if not (epsilon > 0.0):
            raise DomainError(f"epsilon must be > 0, got {epsilon}")
        floor = self.epsilon_floor(route)
        if epsilon < floor:
            raise DomainError(f"epsilon={epsilon} is below the {route} floor {floor}")


# Create singleton instance
settings = GPCSSettings()

# ==================== EXCEPTIONS ====================

class GPCSError(Exception):
    """Base class for every error raised by the toolkit."""


class DomainError(GPCSError, ValueError):
    """An argument lies outside the supported domain of an operation."""


class ConvergenceError(GPCSError, RuntimeError):
    """A series or tolerance target could not be met within its term budget."""

    def __init__(self, message: str, terms_used: int = 0, suggested: Optional[int] = None):
        super().__init__(message)
        self.terms_used = terms_used
        self.suggested = suggested


class RangeOverflowError(GPCSError, OverflowError):
    """An unscaled value is not representable in double precision."""


class ConfigError(GPCSError, ValueError):
    """Invalid run configuration."""

# ==================== SCHEMAS ====================

def _as_array(value: Any, dtype=float) -> np.ndarray:
    arr = np.array(value, dtype=dtype)
    arr.setflags(write=False)
    return arr


def _complex_pairs(values: np.ndarray) -> List[List[float]]:
    return [[float(v.real), float(v.imag)] for v in np.asarray(values, dtype=complex).ravel()]


class SeriesResult(BaseModel):
    """Truncated series value with its bookkeeping."""
    model_config = ConfigDict(frozen=True)

    value: complex
    terms_used: int = Field(ge=0)
    tail_bound: float = Field(ge=0.0)
    route: str = "series"

    @field_serializer("value")
    def _ser_value(self, v: complex):
        return [v.real, v.imag]

    @property
    def real(self) -> float:
        return self.value.real


class MolecularParams(BaseModel):
    """Force parameter rho and equilibrium bond length kappa0 of V(x) = rho (x/k0 - k0/x)^2."""
    model_config = ConfigDict(frozen=True)

    rho: float = Field(gt=0.0, description="Force parameter")
    kappa0: float = Field(gt=0.0, description="Equilibrium bond length")


class ModelParams(BaseModel):
    """
    Parameter bundle of a GPCS family.

    alpha is always 1 + sqrt(1 + 4a)/2 and must exceed 3/2. When coupled,
    gamma = alpha - 1.
    """
    model_config = ConfigDict(frozen=True)

    a: float = Field(gt=0.0, description="Singular coupling of the a/x^2 term")
    alpha: float = Field(description="Basis index, 1 + sqrt(1+4a)/2")
    epsilon: float = Field(gt=0.0, description="Regularization")
    gamma: Optional[float] = Field(default=None, ge=0.0, description="Circular Jacobi charge")
    coupled: bool = False

    @model_validator(mode="after")
    def _check_constraints(self):
        expected = 1.0 + 0.5 * math.sqrt(1.0 + 4.0 * self.a)
        if abs(self.alpha - expected) > 1e-12 * max(1.0, expected):
            raise ValueError(f"alpha={self.alpha} inconsistent with a={self.a} (expected {expected})")
        if not self.alpha > 1.5:
            raise ValueError(f"alpha must exceed 3/2, got {self.alpha}")
        if self.coupled:
            if self.gamma is None or abs(self.gamma - (self.alpha - 1.0)) > 1e-12 * self.alpha:
                raise ValueError(f"coupled params need gamma = alpha - 1, got gamma={self.gamma}")
        return self

    def require_gamma(self) -> float:
        if self.gamma is None:
            raise DomainError("gamma is unset; call set_gamma or couple_gamma first")
        return self.gamma


class QuadratureRule(BaseModel):
    """
    Nodes and positive weights on the circle [0, 2pi) or the half-line [0, inf).

    For circle rules, weight_exponent p means the weights already absorb
    (sin(theta/2))^p, so sum(w f) approximates the integral of sin^p(theta/2) f.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    domain: Literal["circle", "half_line"]
    nodes: np.ndarray
    weights: np.ndarray
    order_hint: int = Field(ge=0)
    weight_exponent: float = Field(default=0.0, ge=0.0)
    scale: float = Field(default=1.0, gt=0.0)

    @field_validator("nodes", "weights", mode="before")
    @classmethod
    def _to_array(cls, v):
        return _as_array(v)

    @model_validator(mode="after")
    def _check_rule(self):
        if self.nodes.shape != self.weights.shape or self.nodes.ndim != 1:
            raise ValueError("nodes and weights must be 1-D arrays of equal length")
        if not np.all(self.weights > 0.0):
            raise ValueError("quadrature weights must be positive")
        if np.any(np.diff(self.nodes) <= 0.0):
            raise ValueError("quadrature nodes must be strictly increasing")
        if self.domain == "circle" and (self.nodes[0] < 0.0 or self.nodes[-1] > 2.0 * math.pi):
            raise ValueError("circle nodes must lie in [0, 2pi]")
        if self.domain == "half_line" and self.nodes[0] < 0.0:
            raise ValueError("half-line nodes must be nonnegative")
        return self

    @property
    def size(self) -> int:
        return int(self.nodes.size)

    @field_serializer("nodes", "weights")
    def _ser_arrays(self, v: np.ndarray):
        return v.tolist()


class GridFunction(BaseModel):
    """Samples of a function on the nodes of a quadrature rule."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    domain: Literal["circle", "half_line"]
    nodes: np.ndarray
    values: np.ndarray
    rule: QuadratureRule

    @field_validator("nodes", mode="before")
    @classmethod
    def _nodes_array(cls, v):
        return _as_array(v)

    @field_validator("values", mode="before")
    @classmethod
    def _values_array(cls, v):
        return _as_array(v, dtype=complex)

    @model_validator(mode="after")
    def _check_grid(self):
        if self.nodes.shape != self.values.shape:
            raise ValueError("nodes and values must have the same shape")
        if np.any(np.diff(self.nodes) <= 0.0):
            raise ValueError("grid nodes must be strictly increasing")
        if not np.all(np.isfinite(self.values)):
            bad = int(np.flatnonzero(~np.isfinite(self.values))[0])
            raise ValueError(f"non-finite value at node {bad} (x={self.nodes[bad]})")
        if self.rule.domain != self.domain:
            raise ValueError("grid domain and rule domain differ")
        return self

    @classmethod
    def from_callable(cls, func: Callable[[np.ndarray], np.ndarray], rule: QuadratureRule) -> "GridFunction":
        return cls(domain=rule.domain, nodes=rule.nodes, values=func(rule.nodes), rule=rule)

    def with_values(self, values: np.ndarray) -> "GridFunction":
        return GridFunction(domain=self.domain, nodes=self.nodes, values=values, rule=self.rule)

    def l2_norm(self) -> float:
        return float(math.sqrt(np.sum(self.rule.weights * np.abs(self.values) ** 2)))

    @field_serializer("nodes")
    def _ser_nodes(self, v: np.ndarray):
        return v.tolist()

    @field_serializer("values")
    def _ser_values(self, v: np.ndarray):
        return _complex_pairs(v)


class CoefficientVector(BaseModel):
    """Truncated PHO-basis coefficients c_0..c_N of a GPCS at one circle point."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    params: ModelParams
    theta: float
    coeffs: np.ndarray
    truncation_tail: float = Field(ge=0.0)
    normalization: float = Field(gt=0.0)

    @field_validator("coeffs", mode="before")
    @classmethod
    def _coeffs_array(cls, v):
        return _as_array(v, dtype=complex)

    @property
    def n_max(self) -> int:
        return int(self.coeffs.size - 1)

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.coeffs) ** 2))

    @field_serializer("coeffs")
    def _ser_coeffs(self, v: np.ndarray):
        return _complex_pairs(v)


class OperatorApplication(BaseModel):
    """Result of applying the damped projector sum e^{-m eps}|m><m| to a grid function."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    epsilon: float
    alpha: float
    input: GridFunction
    output: GridFunction
    route: Literal["kernel_quadrature", "basis_expansion"]
    warnings: List[str] = Field(default_factory=list)

    @model_validator(mode="after")
    def _shared_nodes(self):
        if not np.array_equal(self.input.nodes, self.output.nodes):
            raise ValueError("input and output must share nodes")
        return self


class TransformResult(BaseModel):
    """Circle-grid values of the coherent-state transform."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: Optional[int] = None
    gamma: float
    theta_grid: np.ndarray
    values: np.ndarray
    route: Literal["analytic", "quadrature+extrapolation", "projection"]
    tolerance: float = 0.0
    error_estimate: float = 0.0
    warnings: List[str] = Field(default_factory=list)

    @field_validator("theta_grid", mode="before")
    @classmethod
    def _grid_array(cls, v):
        return _as_array(v)

    @field_validator("values", mode="before")
    @classmethod
    def _values_array(cls, v):
        return _as_array(v, dtype=complex)

    @model_validator(mode="after")
    def _finite(self):
        if self.theta_grid.shape != self.values.shape:
            raise ValueError("theta_grid and values must have the same shape")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("transform values must be finite")
        return self

    @field_serializer("theta_grid")
    def _ser_grid(self, v: np.ndarray):
        return v.tolist()

    @field_serializer("values")
    def _ser_values(self, v: np.ndarray):
        return _complex_pairs(v)


class VerificationReport(BaseModel):
    """One named check at one parameter point."""
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    check: str
    params: Dict[str, Any] = Field(default_factory=dict)
    error: float
    tol: float
    passed: bool = Field(alias="pass")
    detail: Optional[str] = None

    def to_json_line(self) -> str:
        return self.model_dump_json(by_alias=True)


Command = Literal["eval-state", "verify", "transform", "spectrum", "gram"]


class RunConfig(BaseModel):
    """Validated CLI run configuration (flags merged over the optional YAML file)."""
    model_config = ConfigDict(extra="forbid")

    command: Command
    gamma: Optional[float] = Field(default=None, ge=0.0)
    a: Optional[float] = Field(default=None, gt=0.0)
    alpha: Optional[float] = Field(default=None, gt=1.5)
    eps: Optional[float] = Field(default=None, gt=0.0)
    theta: Optional[float] = None
    n: Optional[int] = Field(default=None, ge=0)
    n_max: Optional[int] = Field(default=None, ge=0)
    x_min: float = Field(default=0.0, ge=0.0)
    x_max: float = Field(default=6.0, gt=0.0)
    points: int = Field(default=121, ge=2)
    tol: Optional[float] = Field(default=None, gt=0.0)
    rho: Optional[float] = Field(default=None, gt=0.0)
    kappa0: Optional[float] = Field(default=None, gt=0.0)
    suite: Optional[str] = None
    out: Optional[Path] = None
    format: Literal["csv", "json"] = "csv"

    @model_validator(mode="after")
    def _consistent(self):
        if self.x_max <= self.x_min:
            raise ValueError(f"x_max={self.x_max} must exceed x_min={self.x_min}")
        if self.a is not None and self.alpha is not None:
            expected = 1.0 + 0.5 * math.sqrt(1.0 + 4.0 * self.a)
            if abs(expected - self.alpha) > 1e-12 * expected:
                raise ValueError(f"alpha={self.alpha} inconsistent with a={self.a}")
        if self.command == "transform" and self.alpha is not None and self.gamma is not None:
            if abs(self.alpha - (self.gamma + 1.0)) > 1e-12 * self.alpha:
                raise ValueError("transform is defined in the coupled regime alpha = gamma + 1")
        return self

# ==================== TELEMETRY ====================

log = logging.getLogger("gpcs")


def go_quiet(default_level: Optional[str] = None) -> logging.Logger:
    """
    Silence third-party log spam while keeping the application logger.
    Call first in entry points. Returns the "gpcs" logger.
    """
    os.environ.setdefault("PYTHONUTF8", "1")
    os.environ.setdefault("PYTHONIOENCODING", "utf-8")

    if sys.platform.startswith("win"):
        try:
            sys.stdout.reconfigure(encoding="utf-8")
            sys.stderr.reconfigure(encoding="utf-8")
        except Exception:
            pass

    # Root level from GPCS_LOG_LEVEL unless the caller passes one
    lvl_name = (default_level or settings.LOG_LEVEL).upper()
    lvl = getattr(logging, lvl_name, logging.ERROR)
    logging.basicConfig(
        level=lvl,
        format="%(levelname)s %(name)s: %(message)s",
        force=True,
    )

    noisy = ["matplotlib", "numba", "urllib3", "asyncio", "concurrent.futures"]
    for name in noisy:
        lg = logging.getLogger(name)
        lg.setLevel(logging.CRITICAL)
        lg.propagate = False

    # warnings (numpy floating-point ones included) go through the "py.warnings" logger;
    # expected overflow and log(0) are silenced locally with np.errstate
    logging.captureWarnings(True)

    app_logger = logging.getLogger("gpcs")
    app_logger.setLevel(lvl)
    app_logger.propagate = False
    if not app_logger.handlers:
        h = logging.StreamHandler(sys.stderr)
        h.setLevel(lvl)
        h.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
        app_logger.addHandler(h)
    return app_logger

# ==================== WORKER POOL ====================

def parallel_map(func: Callable[[Any], Any], items: Sequence[Any], max_workers: Optional[int] = None) -> List[Any]:
    """
    Map func over items, serially when the worker cap is 1, else in a process pool.

    func must be picklable (module-level function or functools.partial of one).
    Results come back in input order.
    """
    items = list(items)
    workers = settings.get_threads(max_workers)
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]

    results: List[Any] = [None] * len(items)
    with ProcessPoolExecutor(max_workers=min(workers, len(items))) as ex:
        futures = {ex.submit(func, item): idx for idx, item in enumerate(items)}
        for fut in as_completed(futures):
            idx = futures[fut]
            try:
                results[idx] = fut.result()
            except Exception as e:
                log.error(f"Worker failed on item {idx}: {e}")
                raise
    return results


def ensure_parent(path: Path) -> Path:
    """Create the parent directory of an output path."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


__all__ = [
    "GPCSSettings", "settings",
    "GPCSError", "DomainError", "ConvergenceError", "RangeOverflowError", "ConfigError",
    "SeriesResult", "MolecularParams", "ModelParams", "QuadratureRule", "GridFunction",
    "CoefficientVector", "OperatorApplication", "TransformResult", "VerificationReport",
    "RunConfig", "go_quiet", "parallel_map", "ensure_parent",
]
