"""
Special-function kernels for the GPCS toolkit.

OVERVIEW:
    Gamma/Pochhammer helpers, terminating and real Gauss hypergeometric
    functions, the confluent hypergeometric function, Laguerre polynomials,
    the modified Bessel function I, the Hille-Hardy bilinear kernel, and the two
    generating-function identities that power the normalization and the
    closed-form states.

NUMERICAL ROUTES:
    - 2F1(a,b;c;x), real x in [0,1): direct series for x <= 1/2; for x > 1/2 the
      logarithmic connection formula in powers of 1-x, restricted to c-a-b = -1.
    - 1F1(a;c;z), complex z: Kummer transform when Re z < 0, Taylor series for
      |z| <= Z0, two-sided large-argument expansion beyond, with an e^{-z}-scaled
      variant so callers can combine exponents in log space. When the Taylor sum
      cancels (Im z dominant) or the expansion stalls, c > a > 0 falls back to
      Gauss-Jacobi quadrature of the Beta-mean form E[e^{zt}], t ~ Beta(a, c-a);
      anything still short of HYP1F1_REL_TARGET raises ConvergenceError.
    - I_nu(x): power series (log-sum-exp) for x <= X0, asymptotic expansion
      beyond; everything used by the kernel is kept in log space.

Every infinite series stops on a geometric tail bound: |next term| / (1 - q)
where q bounds every later term ratio (a factor 2 once q = 1/2).
"""

import cmath
import math
import logging
from functools import lru_cache
from typing import Optional, Tuple, Union

import numpy as np
from scipy.special import digamma, gammaln, logsumexp, rgamma, roots_jacobi

from infrastructure import (
    ConvergenceError,
    DomainError,
    RangeOverflowError,
    SeriesResult,
    settings,
)

log = logging.getLogger("gpcs.specfun")

LOG_MAX = math.log(np.finfo(float).max)
_EPS = float(np.finfo(float).eps)

ArrayLike = Union[float, np.ndarray]


class CompensatedSum:
    """Kahan accumulator; works for real and complex terms alike."""

    __slots__ = ("total", "_carry")

    def __init__(self, start: complex = 0.0):
        self.total = start
        self._carry = 0.0 * start

    def add(self, term: complex) -> None:
        y = term - self._carry
        t = self.total + y
        self._carry = (t - self.total) - y
        self.total = t


def _geometric_tail(next_term: float, ratio_bound: float) -> float:
    if ratio_bound >= 1.0:
        return math.inf
    return abs(next_term) / (1.0 - ratio_bound)


def _is_nonpositive_integer(v: float) -> bool:
    return v <= 0.0 and float(v).is_integer()

# ==================== GAMMA / POCHHAMMER ====================

def log_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0."""
    if not x > 0.0:
        raise DomainError(f"log_gamma needs x > 0, got {x}")
    return float(gammaln(x))


def log_pochhammer(nu: float, n: int) -> float:
    """ln (nu)_n for nu > 0."""
    if n < 0:
        raise DomainError(f"pochhammer index must be >= 0, got {n}")
    if not nu > 0.0:
        raise DomainError(f"log_pochhammer needs nu > 0, got {nu}")
    if n == 0:
        return 0.0
    return float(gammaln(nu + n) - gammaln(nu))


def pochhammer(nu: float, n: int) -> float:
    """
    Rising factorial (nu)_n.

    Products for small n, Gamma ratio for large n when nu > 0. Raises
    RangeOverflowError when the value is not representable (use log_pochhammer).
    """
    if n < 0:
        raise DomainError(f"pochhammer index must be >= 0, got {n}")
    if n <= 30 or nu <= 0.0:
        prod = 1.0
        for k in range(n):
            prod *= nu + k
            if not math.isfinite(prod):
                raise RangeOverflowError(f"(nu)_n overflows for nu={nu}, n={n}; use log_pochhammer")
        return prod
    lp = log_pochhammer(nu, n)
    if lp > LOG_MAX:
        raise RangeOverflowError(f"(nu)_n overflows for nu={nu}, n={n}; use log_pochhammer")
    return math.exp(lp)


def rising_over_factorial(p: float, n_max: int) -> np.ndarray:
    """The sequence (p)_j / j! for j = 0..n_max, by cumulative products."""
    if n_max < 0:
        raise DomainError(f"n_max must be >= 0, got {n_max}")
    out = np.ones(n_max + 1)
    if n_max > 0:
        j = np.arange(1, n_max + 1, dtype=float)
        out[1:] = np.cumprod((p + j - 1.0) / j)
    return out


def binomial_tail_bound(c: float, r: float, n: int) -> float:
    """
    Upper bound on sum_{m > n} (c)_m / m! r^m for c > 0 and 0 <= r < 1.

    Returns inf when the term ratio bound is not yet below 1.
    """
    m = n + 1
    # (c)_m / m! r^m in log space
    log_term = float(gammaln(c + m) - gammaln(c) - gammaln(m + 1.0)) + (m * math.log(r) if r > 0 else -math.inf)
    if log_term == -math.inf:
        return 0.0
    ratio = r * max(1.0, (c + m) / (m + 1.0))
    return _geometric_tail(math.exp(log_term), ratio)


def binomial_tail_terms(c: float, r: float, tol: float, max_terms: Optional[int] = None) -> int:
    """
    Smallest n with sum_{m > n} (c)_m / m! r^m <= tol.

    This sequence bounds every series built on |g_n| <= (gamma+1)_n / n!.
    """
    max_terms = max_terms or settings.MAX_EXPANSION_TERMS
    if not (0.0 <= r < 1.0):
        raise DomainError(f"ratio must lie in [0, 1), got {r}")
    if r == 0.0:
        return 0
    # geometric estimate first, then walk upward
    guess = max(1, int((math.log(tol) - 2.0) / math.log(r)) // 2)
    n = min(guess, max_terms)
    while binomial_tail_bound(c, r, n) > tol:
        n = int(n * 1.25) + 1
        if n > max_terms:
            raise ConvergenceError(
                f"series with c={c}, r={r} needs more than {max_terms} terms for tail {tol:.1e}",
                terms_used=max_terms,
            )
    # shrink back to the smallest admissible n
    lo, hi = 0, n
    while lo < hi:
        mid = (lo + hi) // 2
        if binomial_tail_bound(c, r, mid) <= tol:
            hi = mid
        else:
            lo = mid + 1
    return lo

# ==================== GAUSS 2F1 ====================

def hyp2f1_terminating(n: int, b: float, c: float, z: complex) -> complex:
    """
    2F1(-n, b; c; z) as the finite sum over k <= n with compensated summation.
    """
    if n < 0:
        raise DomainError(f"degree must be >= 0, got {n}")
    if _is_nonpositive_integer(c) and c > -n:
        raise DomainError(f"c={c} hits a pole of the terminating series of degree {n}")
    z = complex(z)
    term = 1.0 + 0.0j
    acc = CompensatedSum(1.0 + 0.0j)
    for k in range(n):
        term *= (k - n) * (b + k) / ((c + k) * (k + 1.0)) * z
        acc.add(term)
    return complex(acc.total)


def jacobi_expansion(n_max: int, a: float, c: float, u: complex) -> np.ndarray:
    """
    P_n = (c)_n / n! * 2F1(-n, a; c; 1-u) for n = 0..n_max.

    Uses the generating function (1-t)^{a-c} (1-ut)^{-a}: P is the convolution of
    (c-a)_j/j! with (a)_k/k! u^k. Both sequences are nonnegative when c >= a > 0,
    so there is no cancellation on |u| <= 1.
    """
    if n_max < 0:
        raise DomainError(f"n_max must be >= 0, got {n_max}")
    left = rising_over_factorial(c - a, n_max)
    right = rising_over_factorial(a, n_max)
    k = np.arange(n_max + 1, dtype=float)
    u = complex(u)
    modulus = abs(u)
    if modulus == 0.0:
        powers = np.zeros(n_max + 1, dtype=complex)
        powers[0] = 1.0
    else:
        powers = np.exp(k * math.log(modulus) + 1j * k * cmath.phase(u))
    return np.convolve(left, right * powers)[: n_max + 1]


def jacobi_recurrence(n_max: int, a: float, c: float, u: complex) -> np.ndarray:
    """
    Same sequence as jacobi_expansion, in O(n_max) by the contiguous relation in n:

        (n+1) P_{n+1} = (n + c - a + (n + a) u) P_n - u (n + c - 1) P_{n-1}

    On |u| = 1 the solutions grow like n^{c-a} u^n and n^{c-a-1}, so the forward
    direction follows the dominant one.
    """
    if n_max < 0:
        raise DomainError(f"n_max must be >= 0, got {n_max}")
    u = complex(u)
    out = np.empty(n_max + 1, dtype=complex)
    prev, cur = 0.0j, 1.0 + 0.0j
    out[0] = cur
    for n in range(n_max):
        prev, cur = cur, ((n + c - a + (n + a) * u) * cur - u * (n + c - 1.0) * prev) / (n + 1.0)
        out[n + 1] = cur
    return out


def hyp2f1_series(a: float, b: float, c: float, x: float, tol: Optional[float] = None) -> SeriesResult:
    """Direct Gauss series for real 0 <= x < 1."""
    tol = tol or settings.SERIES_TOL
    max_terms = settings.MAX_SERIES_TERMS
    if not (0.0 <= x < 1.0):
        raise DomainError(f"hyp2f1 series needs 0 <= x < 1, got {x}")
    if c <= 0.0:
        raise DomainError(f"hyp2f1 needs c > 0, got {c}")
    # |f(j) - 1| <= |B|/(j+1) + |C|/((c+j)(j+1)) bounds every later term ratio
    B = abs(a + b - c - 1.0)
    C = abs(a * b - c)
    term = 1.0
    acc = CompensatedSum(1.0)
    for k in range(max_terms):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * x
        acc.add(term)
        j = k + 1
        next_term = term * (a + j) * (b + j) / ((c + j) * (j + 1.0)) * x
        ratio = x * (1.0 + B / (j + 2.0) + C / ((c + j + 1.0) * (j + 2.0)))
        tail = _geometric_tail(next_term, ratio)
        if tail <= tol * abs(acc.total):
            return SeriesResult(value=acc.total, terms_used=k + 2, tail_bound=tail, route="series")
        if term == 0.0:
            return SeriesResult(value=acc.total, terms_used=k + 2, tail_bound=0.0, route="series")
    raise ConvergenceError(f"hyp2f1({a}, {b}; {c}; {x}) did not converge in {max_terms} terms", terms_used=max_terms)


def hyp2f1_connection(
    a: float, b: float, c: float, x: float, tol: Optional[float] = None, complement: Optional[float] = None
) -> SeriesResult:
    """
    2F1(a, b; a+b-1; x) near x = 1 through the logarithmic connection formula.

    With w = 1 - x (pass `complement` when it is known more accurately than 1 - x):

        F = G(c)/(G(a)G(b)) / w
          + G(c)/(G(a-1)G(b-1)) sum_n (a)_n (b)_n / (n! (n+1)!) w^n
                [ln w - psi(n+1) - psi(n+2) + psi(a+n) + psi(b+n)]
    """
    tol = tol or settings.SERIES_TOL
    max_terms = settings.MAX_SERIES_TERMS
    if abs(c - a - b + 1.0) > 1e-12 * max(1.0, abs(c)):
        raise DomainError(f"connection formula only covers c - a - b = -1, got c={c}, a={a}, b={b}")
    w = (1.0 - x) if complement is None else complement
    if not (0.0 < w < 1.0):
        raise DomainError(f"connection formula needs 0 < 1-x < 1, got 1-x={w}")
    lead = math.exp(gammaln(c) - gammaln(a) - gammaln(b)) / w
    pref = math.exp(gammaln(c)) * float(rgamma(a - 1.0)) * float(rgamma(b - 1.0))
    if pref == 0.0:
        return SeriesResult(value=lead, terms_used=1, tail_bound=0.0, route="connection")

    lw = math.log(w)
    psi1 = float(digamma(1.0))
    psi2 = float(digamma(2.0))
    psia = float(digamma(a))
    psib = float(digamma(b))
    B = abs(a + b - 3.0)
    C = abs(a * b - 2.0)
    term = 1.0
    acc = CompensatedSum(term * (lw - psi1 - psi2 + psia + psib))
    for n in range(max_terms):
        term *= (a + n) * (b + n) / ((n + 1.0) * (n + 2.0)) * w
        psi1 += 1.0 / (n + 1.0)
        psi2 += 1.0 / (n + 2.0)
        psia += 1.0 / (a + n)
        psib += 1.0 / (b + n)
        bracket = lw - psi1 - psi2 + psia + psib
        acc.add(term * bracket)
        j = n + 1
        ratio = w * (1.0 + B / (j + 1.0) + C / ((j + 1.0) * (j + 2.0)))
        next_term = term * (a + j) * (b + j) / ((j + 1.0) * (j + 2.0)) * w
        # the bracket drifts by O(1/n) per step; a factor 2 covers it
        tail = 2.0 * _geometric_tail(next_term * (abs(bracket) + 1.0), ratio)
        if abs(pref) * tail <= tol * abs(lead + pref * acc.total):
            value = lead + pref * acc.total
            return SeriesResult(value=value, terms_used=n + 2, tail_bound=abs(pref) * tail, route="connection")
    raise ConvergenceError(f"connection series for 2F1 at x={x} did not converge", terms_used=max_terms)


def hyp2f1(
    a: float, b: float, c: float, x: float, tol: Optional[float] = None, complement: Optional[float] = None
) -> float:
    """
    Real 2F1(a, b; c; x) for a, b, c > 0 and 0 <= x < 1.

    x > 1/2 is only supported when c - a - b = -1; the value then grows like 1/(1-x).
    """
    if not (a > 0.0 and b > 0.0 and c > 0.0):
        raise DomainError(f"hyp2f1 needs a, b, c > 0, got a={a}, b={b}, c={c}")
    if complement is not None:
        x = 1.0 - complement
    if not (0.0 <= x < 1.0) or (complement is not None and not complement > 0.0):
        raise DomainError(f"hyp2f1 needs 0 <= x < 1, got x={x}")
    if x == 0.0:
        return 1.0
    if x <= 0.5:
        return hyp2f1_series(a, b, c, x, tol).real
    result = hyp2f1_connection(a, b, c, x, tol, complement=complement)
    log.debug(f"hyp2f1 connection route at x={x}: {result.terms_used} terms")
    return result.real

# ==================== CONFLUENT 1F1 ====================

def _hyp1f1_taylor(a: float, c: float, z: complex, tol: float) -> Tuple[complex, int, float, float]:
    """Taylor sum, terms used, tail bound and sum of |terms| (the rounding scale)."""
    max_terms = settings.MAX_SERIES_TERMS
    term = 1.0 + 0.0j
    acc = CompensatedSum(1.0 + 0.0j)
    scale = 1.0
    growth = max(1.0, abs(a) / c)
    az = abs(z)
    for k in range(max_terms):
        term *= (a + k) / ((c + k) * (k + 1.0)) * z
        acc.add(term)
        scale += abs(term)
        if term == 0.0:
            return acc.total, k + 2, 0.0, scale
        j = k + 1
        next_term = term * (a + j) / ((c + j) * (j + 1.0)) * z
        tail = _geometric_tail(abs(next_term), az * growth / (j + 2.0))
        if tail <= tol * abs(acc.total):
            return acc.total, k + 2, tail, scale
    raise ConvergenceError(f"1F1({a}; {c}; {z}) Taylor series exceeded {max_terms} terms", terms_used=max_terms)


@lru_cache(maxsize=256)
def _beta_nodes(n: int, a: float, c: float) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Jacobi nodes on [0, 1] for the Beta(a, c-a) density, weights summing to 1."""
    x, w = roots_jacobi(n, c - a - 1.0, a - 1.0)
    return 0.5 * (1.0 + x), w / np.sum(w)


def _hyp1f1_beta_mean(a: float, c: float, z: complex, tol: float) -> Tuple[complex, int, float]:
    """
    e^{-z} 1F1(a; c; z) as the mean of e^{-z(1-t)} over t ~ Beta(a, c-a), for c > a > 0.

    The integrand is entire, so Gauss-Jacobi converges geometrically once
    n exceeds |z|/2; the error estimate is the change from n to n + 8 nodes.
    """
    n = 32 + int(math.ceil(0.5 * abs(z)))
    values = []
    for m in (n, n + 8):
        t, w = _beta_nodes(m, a, c)
        f = np.exp(-z * (1.0 - t))
        values.append((complex(w @ f), float(w @ np.abs(f))))
    (coarse, _), (fine, scale) = values
    tail = abs(fine - coarse) + _EPS * scale * (n + 8)
    if tail > tol * abs(fine):
        raise ConvergenceError(
            f"1F1({a}; {c}; {z}) by Beta quadrature reaches only {tail / abs(fine):.1e} relative", terms_used=n + 8,
        )
    return fine, n + 8, tail


def _asymptotic_sum(p: float, q: float, u: complex, tol: float) -> Tuple[complex, int, float]:
    """sum_s (p)_s (q)_s / s! u^s, stopped at tolerance or at its smallest term."""
    term = 1.0 + 0.0j
    acc = CompensatedSum(1.0 + 0.0j)
    last = 1.0
    for s in range(settings.MAX_SERIES_TERMS):
        term *= (p + s) * (q + s) / (s + 1.0) * u
        mag = abs(term)
        if mag == 0.0:
            return acc.total, s + 1, 0.0
        if mag > last and s > 2:
            # divergent from here on; accept only if already tight
            if last <= math.sqrt(tol) * abs(acc.total):
                return acc.total, s + 1, last
            raise ConvergenceError(f"asymptotic series stalled at relative size {last / abs(acc.total):.1e}", terms_used=s + 1)
        acc.add(term)
        last = mag
        if mag <= tol * abs(acc.total):
            return acc.total, s + 2, mag
    raise ConvergenceError("asymptotic series exceeded the term budget", terms_used=settings.MAX_SERIES_TERMS)


def _hyp1f1_scaled_asymptotic(a: float, c: float, z: complex, tol: float) -> Tuple[complex, int, float]:
    """
    e^{-z} 1F1(a; c; z) for large |z| off the negative real axis.

    1F1 ~ G(c) [ e^z z^{a-c} / G(a) S1 + e^{+-i pi a} z^{-a} / G(c-a) S2 ],
    the sign following Im z (principal logarithm throughout).
    """
    logz = cmath.log(z)
    sign = 1.0 if z.imag >= 0.0 else -1.0
    gc = math.exp(gammaln(c))
    value = 0.0 + 0.0j
    terms = 0
    tail = 0.0
    ra = float(rgamma(a))
    if ra != 0.0:
        s1, n1, t1 = _asymptotic_sum(c - a, 1.0 - a, 1.0 / z, tol)
        part = ra * cmath.exp((a - c) * logz)
        value += part * s1
        terms += n1
        tail += abs(part) * t1
    rca = float(rgamma(c - a))
    if rca != 0.0:
        s2, n2, t2 = _asymptotic_sum(a, a - c + 1.0, -1.0 / z, tol)
        # e^{-z} scaling; underflows harmlessly when Re z is large
        log_part = -z + sign * 1j * math.pi * a - a * logz
        part = rca * cmath.exp(log_part) if log_part.real > -745.0 else 0.0
        value += part * s2
        terms += n2
        tail += abs(part) * t2
    return gc * value, terms, gc * tail


def _hyp1f1_dispatch(a: float, c: float, z: complex, tol: float, scaled: bool) -> SeriesResult:
    if not c > 0.0:
        raise DomainError(f"hyp1f1 needs c > 0, got {c}")
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError(f"hyp1f1 argument must be finite, got {z}")

    if _is_nonpositive_integer(a):
        # terminating polynomial; exact finite sum for any z
        value, terms, _, _ = _hyp1f1_taylor(a, c, z, tol)
        if scaled:
            value = value * cmath.exp(-z) if -z.real < LOG_MAX else _overflow(a, c, z)
        return SeriesResult(value=value, terms_used=terms, tail_bound=0.0, route="terminating")

    if a == c:
        value = 1.0 + 0.0j if scaled else (cmath.exp(z) if z.real < LOG_MAX else _overflow(a, c, z))
        return SeriesResult(value=value, terms_used=1, tail_bound=0.0, route="exponential")

    if z.real < 0.0:
        inner = _hyp1f1_dispatch(c - a, c, -z, tol, not scaled)
        return SeriesResult(value=inner.value, terms_used=inner.terms_used, tail_bound=inner.tail_bound,
                            route=f"kummer+{inner.route}")

    target = max(tol, settings.HYP1F1_REL_TARGET)
    if abs(z) <= settings.HYP1F1_SERIES_RADIUS:
        value, terms, tail, scale = _hyp1f1_taylor(a, c, z, tol)
        # rounding in the partial sums is ~ eps * sum |terms|; large when Im z dominates
        if _EPS * scale <= target * abs(value):
            if scaled:
                factor = cmath.exp(-z)
                value, tail = value * factor, tail * abs(factor)
            return SeriesResult(value=value, terms_used=terms, tail_bound=tail, route="series")
        log.debug(f"1F1({a}; {c}; {z}): Taylor cancels by {scale / abs(value):.1e}, rerouting")
        routes = ("beta", "asymptotic")
    else:
        routes = ("asymptotic", "beta")

    failures = []
    for route in routes:
        try:
            if route == "beta":
                if not c > a > 0.0:
                    failures.append("beta needs c > a > 0")
                    continue
                value, terms, tail = _hyp1f1_beta_mean(a, c, z, target)
            else:
                value, terms, tail = _hyp1f1_scaled_asymptotic(a, c, z, tol)
                if tail > target * abs(value):
                    failures.append(f"asymptotic reaches only {tail / abs(value):.1e}")
                    continue
        except ConvergenceError as e:
            failures.append(str(e))
            continue
        if not scaled:
            if z.real + math.log(max(abs(value), 1e-300)) > LOG_MAX:
                _overflow(a, c, z)
            factor = cmath.exp(z)
            value, tail = value * factor, tail * abs(factor)
        return SeriesResult(value=value, terms_used=terms, tail_bound=tail, route=route)
    raise ConvergenceError(f"1F1({a}; {c}; {z}) unresolved to {target:.0e}: " + "; ".join(failures))


def _overflow(a: float, c: float, z: complex):
    raise RangeOverflowError(f"1F1({a}; {c}; {z}) is not representable; use hyp1f1_scaled")


def hyp1f1(a: float, c: float, z: complex, tol: Optional[float] = None) -> SeriesResult:
    """Confluent hypergeometric 1F1(a; c; z) for c > 0 and complex z."""
    return _hyp1f1_dispatch(a, c, z, tol or settings.SERIES_TOL, scaled=False)


def hyp1f1_scaled(a: float, c: float, z: complex, tol: Optional[float] = None) -> SeriesResult:
    """e^{-z} 1F1(a; c; z); finite wherever the exponential factor alone would overflow."""
    return _hyp1f1_dispatch(a, c, z, tol or settings.SERIES_TOL, scaled=True)

# ==================== LAGUERRE ====================

def laguerre_table(n_max: int, nu: float, x: ArrayLike) -> np.ndarray:
    """
    L_n^{(nu)}(x) for n = 0..n_max, shape (n_max+1,) + shape(x).

    (n+1) L_{n+1} = (2n+1+nu-x) L_n - (n+nu) L_{n-1}, forward-stable for x >= 0.
    """
    if n_max < 0:
        raise DomainError(f"n_max must be >= 0, got {n_max}")
    if not nu > -1.0:
        raise DomainError(f"laguerre needs nu > -1, got {nu}")
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = 1.0 + nu - x
    for n in range(1, n_max):
        out[n + 1] = ((2 * n + 1 + nu - x) * out[n] - (n + nu) * out[n - 1]) / (n + 1)
    return out


def laguerre(n: int, nu: float, x: ArrayLike) -> ArrayLike:
    """Generalized Laguerre polynomial L_n^{(nu)}(x)."""
    if n < 0:
        raise DomainError(f"degree must be >= 0, got {n}")
    if np.any(np.asarray(x) < 0.0):
        raise DomainError("laguerre is evaluated on x >= 0 only")
    values = laguerre_table(n, nu, x)[n]
    return float(values) if np.ndim(values) == 0 else values

# ==================== MODIFIED BESSEL I ====================

def _series_reduced(nu: float, x: np.ndarray) -> np.ndarray:
    """ln sum_k (x/2)^{2k} / (k! G(k+nu+1)), vectorized with log-sum-exp."""
    xmax = float(np.max(x)) if x.size else 0.0
    n_terms = int(0.5 * xmax + 12.0 * math.sqrt(xmax) + 40)
    k = np.arange(n_terms, dtype=float)[:, None]
    positive = x > 0.0
    lx = np.log(np.where(positive, 0.5 * x, 1.0))[None, :]
    logt = 2.0 * k * lx - gammaln(k + 1.0) - gammaln(k + nu + 1.0)
    logt = np.where(positive[None, :] | (k == 0), logt, -np.inf)
    return logsumexp(logt, axis=0)


def _asymptotic_log_i(nu: float, x: np.ndarray, n_terms: int = 30) -> np.ndarray:
    """ln I_nu(x) ~ x - ln(2 pi x)/2 + ln sum_k (-1)^k a_k(nu) / x^k."""
    mu = 4.0 * nu * nu
    acc = np.ones_like(x)
    term = np.ones_like(x)
    for k in range(1, n_terms + 1):
        term = term * (-(mu - (2 * k - 1) ** 2) / (8.0 * k * x))
        acc = acc + term
    return x - 0.5 * np.log(2.0 * math.pi * x) + np.log(acc)


def log_bessel_i_reduced(nu: float, x: ArrayLike) -> ArrayLike:
    """
    ln( I_nu(x) / (x/2)^nu ), finite at x = 0 where it equals -ln G(nu+1).
    """
    if nu < 0.0:
        raise DomainError(f"bessel_i needs nu >= 0, got {nu}")
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0.0):
        raise DomainError("bessel_i needs x >= 0")
    flat = xa.ravel()
    out = np.empty_like(flat)
    big = flat > max(settings.BESSEL_SWITCH, nu * nu)
    if np.any(big):
        xb = flat[big]
        out[big] = _asymptotic_log_i(nu, xb) - nu * np.log(0.5 * xb)
    if np.any(~big):
        out[~big] = _series_reduced(nu, flat[~big])
    out = out.reshape(xa.shape)
    return float(out) if out.ndim == 0 else out


def log_bessel_i(nu: float, x: ArrayLike) -> ArrayLike:
    """ln I_nu(x); -inf at x = 0 for nu > 0."""
    xa = np.asarray(x, dtype=float)
    reduced = np.asarray(log_bessel_i_reduced(nu, xa))
    with np.errstate(divide="ignore"):
        power = np.where(xa > 0.0, nu * np.log(np.where(xa > 0.0, 0.5 * xa, 1.0)), 0.0 if nu == 0.0 else -np.inf)
    out = reduced + power
    return float(out) if out.ndim == 0 else out


def bessel_i(nu: float, x: ArrayLike) -> ArrayLike:
    """Modified Bessel function I_nu(x); raises RangeOverflowError past the double range."""
    logs = np.asarray(log_bessel_i(nu, x))
    if np.any(logs > LOG_MAX):
        raise RangeOverflowError(f"I_{nu}(x) overflows; use log_bessel_i")
    out = np.exp(logs)
    return float(out) if out.ndim == 0 else out

# ==================== HILLE-HARDY KERNEL ====================

def log_hille_hardy_kernel(
    tau: float, xi: ArrayLike, zeta: ArrayLike, alpha: float, one_minus_tau: Optional[float] = None
) -> ArrayLike:
    """
    ln K(tau; xi, zeta) with

        K = (1-tau)^{-1} (xi zeta tau)^{-(alpha-1)/2} exp(-tau (xi+zeta)/(1-tau))
            I_{alpha-1}( 2 sqrt(xi zeta tau) / (1-tau) )

    evaluated through the reduced Bessel function so xi zeta = 0 is regular.
    """
    if not (0.0 < tau < 1.0):
        raise DomainError(f"kernel needs 0 < tau < 1, got {tau}")
    if not alpha > 1.5:
        raise DomainError(f"kernel needs alpha > 3/2, got {alpha}")
    xi = np.asarray(xi, dtype=float)
    zeta = np.asarray(zeta, dtype=float)
    if np.any(xi < 0.0) or np.any(zeta < 0.0):
        raise DomainError("kernel arguments must be >= 0")
    omt = (1.0 - tau) if one_minus_tau is None else one_minus_tau
    y = 2.0 * np.sqrt(xi * zeta * tau) / omt
    out = -alpha * math.log(omt) - tau * (xi + zeta) / omt + np.asarray(log_bessel_i_reduced(alpha - 1.0, y))
    return float(out) if np.ndim(out) == 0 else out


def hille_hardy_kernel(tau: float, xi: ArrayLike, zeta: ArrayLike, alpha: float) -> ArrayLike:
    """Closed Hille-Hardy form of sum_m tau^m m!/G(m+alpha) L_m(xi) L_m(zeta), nu = alpha-1."""
    out = np.exp(np.asarray(log_hille_hardy_kernel(tau, xi, zeta, alpha)))
    return float(out) if out.ndim == 0 else out


def hille_hardy_series(tau: float, xi: float, zeta: float, alpha: float, n_terms: int = 200) -> float:
    """Partial sum of the bilinear Laguerre series with n_terms terms."""
    if not (0.0 < tau < 1.0):
        raise DomainError(f"kernel needs 0 < tau < 1, got {tau}")
    nu = alpha - 1.0
    lx = laguerre_table(n_terms - 1, nu, xi)
    lz = laguerre_table(n_terms - 1, nu, zeta)
    m = np.arange(n_terms, dtype=float)
    weights = np.exp(m * math.log(tau) + gammaln(m + 1.0) - gammaln(m + alpha))
    return math.fsum(weights * lx * lz)

# ==================== GENERATING-FUNCTION IDENTITIES ====================

def bilinear_hypergeometric_series(
    a: float, b: float, c: float, xi: complex, zeta: complex, r: float, tol: Optional[float] = None
) -> SeriesResult:
    """
    sum_n (c)_n r^n / n! 2F1(-n, a; c; xi) 2F1(-n, b; c; zeta).

    Needs c >= a, b > 0 and |1-xi|, |1-zeta| <= 1 so every term is bounded by
    (c)_n/n! r^n; the tail bound follows from that sequence.
    """
    tol = tol or 1e-15
    if not (c >= a > 0.0 and c >= b > 0.0):
        raise DomainError(f"bilinear series needs c >= a, b > 0, got a={a}, b={b}, c={c}")
    if abs(1.0 - complex(xi)) > 1.0 + 1e-14 or abs(1.0 - complex(zeta)) > 1.0 + 1e-14:
        raise DomainError("bilinear series needs |1-xi| <= 1 and |1-zeta| <= 1")
    if not (0.0 <= r < 1.0):
        raise DomainError(f"bilinear series needs 0 <= r < 1, got {r}")
    n_max = binomial_tail_terms(c, r, tol)
    pa = jacobi_expansion(n_max, a, c, 1.0 - complex(xi))
    pb = jacobi_expansion(n_max, b, c, 1.0 - complex(zeta))
    n = np.arange(n_max + 1, dtype=float)
    with np.errstate(divide="ignore"):
        log_w = n * math.log(r) if r > 0 else np.where(n == 0, 0.0, -np.inf)
    weights = np.exp(log_w + gammaln(n + 1.0) - gammaln(c + n) + gammaln(c))
    terms = weights * pa * pb
    value = complex(math.fsum(terms.real), math.fsum(terms.imag))
    return SeriesResult(value=value, terms_used=n_max + 1, tail_bound=binomial_tail_bound(c, r, n_max), route="series")


def bilinear_hypergeometric_closed(a: float, b: float, c: float, xi: complex, zeta: complex, r: float) -> complex:
    """
    (1-r)^{a+b-c} (1-r+xi r)^{-a} (1-r+zeta r)^{-b} 2F1(a, b; c; w),
    w = r xi zeta / ((1-r+xi r)(1-r+zeta r)); w must be real in [0, 1).
    """
    xi, zeta = complex(xi), complex(zeta)
    d1 = 1.0 - r + xi * r
    d2 = 1.0 - r + zeta * r
    w = r * xi * zeta / (d1 * d2)
    if abs(w.imag) > 1e-12 * max(1.0, abs(w)) or not (0.0 <= w.real < 1.0):
        raise DomainError(f"closed side needs a real argument in [0, 1), got {w}")
    hyp = hyp2f1(a, b, c, w.real)
    return (1.0 - r) ** (a + b - c) * cmath.exp(-a * cmath.log(d1) - b * cmath.log(d2)) * hyp


def bilateral_laguerre_series(t: float, c: float, nu: float, y: complex, u: float, tol: Optional[float] = None) -> SeriesResult:
    """
    sum_n t^n 2F1(-n, c; 1+nu; y) L_n^{(nu)}(u) for 0 <= t < 1, u >= 0.

    Needs 1+nu >= c > 0 and |1-y| <= 1; uses |2F1| <= 1 and
    |L_n^{(nu)}(u)| <= (nu+1)_n/n! e^{u/2} for the tail.
    """
    tol = tol or 1e-15
    if not (1.0 + nu >= c > 0.0):
        raise DomainError(f"bilateral series needs 1+nu >= c > 0, got c={c}, nu={nu}")
    if abs(1.0 - complex(y)) > 1.0 + 1e-14:
        raise DomainError("bilateral series needs |1-y| <= 1")
    if not (0.0 <= t < 1.0) or u < 0.0:
        raise DomainError(f"bilateral series needs 0 <= t < 1 and u >= 0, got t={t}, u={u}")
    envelope = math.exp(0.5 * u)
    n_max = binomial_tail_terms(nu + 1.0, t, tol / envelope)
    p = jacobi_expansion(n_max, c, 1.0 + nu, 1.0 - complex(y))
    n = np.arange(n_max + 1, dtype=float)
    hyp = p * np.exp(gammaln(n + 1.0) - gammaln(1.0 + nu + n) + gammaln(1.0 + nu))
    lag = laguerre_table(n_max, nu, u)
    terms = hyp * lag * np.exp(n * math.log(t)) if t > 0 else hyp[:1] * lag[:1]
    value = complex(math.fsum(np.real(terms)), math.fsum(np.imag(terms)))
    tail = envelope * binomial_tail_bound(nu + 1.0, t, n_max)
    return SeriesResult(value=value, terms_used=n_max + 1, tail_bound=tail, route="series")


def bilateral_laguerre_closed(t: float, c: float, nu: float, y: complex, u: float) -> complex:
    """
    (1-t)^{-1+c-nu} (1-t+yt)^{-c} exp(-ut/(1-t)) 1F1(c; 1+nu; y u t / ((1-t)(1-t+yt))).
    """
    y = complex(y)
    d = 1.0 - t + y * t
    z = y * u * t / ((1.0 - t) * d)
    scaled = hyp1f1_scaled(c, 1.0 + nu, z).value
    log_pref = (-1.0 + c - nu) * math.log(1.0 - t) - c * cmath.log(d) - u * t / (1.0 - t) + z
    return cmath.exp(log_pref) * scaled


__all__ = [
    "CompensatedSum", "log_gamma", "log_pochhammer", "pochhammer", "rising_over_factorial",
    "binomial_tail_bound", "binomial_tail_terms", "hyp2f1_terminating", "jacobi_expansion", "jacobi_recurrence",
    "hyp2f1_series", "hyp2f1_connection", "hyp2f1", "hyp1f1", "hyp1f1_scaled",
    "laguerre_table", "laguerre", "log_bessel_i_reduced", "log_bessel_i", "bessel_i",
    "log_hille_hardy_kernel", "hille_hardy_kernel", "hille_hardy_series",
    "bilinear_hypergeometric_series", "bilinear_hypergeometric_closed",
    "bilateral_laguerre_series", "bilateral_laguerre_closed",
]
