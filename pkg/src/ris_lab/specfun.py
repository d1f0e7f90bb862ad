"""Special functions used by the closed-form coverage and rate expressions.

Everything here is real-argument and scalar-first. ``reg_upper_gamma_q`` and
``kummer_half`` are hand-written (series / continued fraction / Bessel
identity); the exponentially-scaled Bessel functions come from scipy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import ive

__all__ = [
    "QuadratureSpec",
    "QuadratureError",
    "log_gamma",
    "reg_upper_gamma_q",
    "reg_lower_gamma_p",
    "log_reg_lower_gamma_p",
    "kummer_half",
    "kummer_half_series",
    "kummer_half_bessel",
    "expected_log1p_gamma",
]

_EPS = 1e-16
_MAX_ITER = 100_000
_KUMMER_SWITCH = 20.0


class QuadratureError(ArithmeticError):
    """Raised when the expected-log quadrature misses its tolerance.

    ``estimate`` holds the last value reached, ``error`` the last change
    between refinements.
    """

    def __init__(self, message: str, estimate: float, error: float):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


@dataclass(frozen=True)
class QuadratureSpec:
    node_count: int = 32
    relative_tolerance: float = 1e-10
    max_refinements: int = 12

    def __post_init__(self):
        if self.node_count < 16:
            raise ValueError(f"node_count must be >= 16, got {self.node_count}")
        if not (0.0 < self.relative_tolerance <= 1e-4):
            raise ValueError(
                f"relative_tolerance must lie in (0, 1e-4], got {self.relative_tolerance}"
            )


def log_gamma(x: float) -> float:
    if not x > 0:
        raise ValueError(f"log_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def _lower_series(k: float, x: float) -> tuple[float, float]:
    """Return (log prefactor, series sum) with P(k, x) = exp(prefactor) * sum."""
    term = 1.0 / k
    total = term
    ap = k
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    else:
        raise ArithmeticError(f"lower incomplete gamma series did not converge (k={k}, x={x})")
    return k * math.log(x) - x - math.lgamma(k), total


def _upper_cf(k: float, x: float) -> tuple[float, float]:
    """Modified Lentz evaluation; Q(k, x) = exp(prefactor) * value."""
    tiny = 1e-300
    b = x + 1.0 - k
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - k)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    else:
        raise ArithmeticError(f"upper incomplete gamma fraction did not converge (k={k}, x={x})")
    return k * math.log(x) - x - math.lgamma(k), h


def _check_gamma_args(k: float, x: float) -> None:
    if not k > 0:
        raise ValueError(f"shape must be positive, got {k}")
    if not x >= 0:
        raise ValueError(f"argument must be nonnegative, got {x}")


def reg_upper_gamma_q(k: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(k, x) = Gamma(k, x) / Gamma(k)."""
    _check_gamma_args(k, x)
    if x == 0.0:
        return 1.0
    if math.isinf(x):
        return 0.0
    if x < k + 1.0:
        logpre, s = _lower_series(k, x)
        return min(1.0, max(0.0, 1.0 - math.exp(logpre) * s))
    logpre, h = _upper_cf(k, x)
    return min(1.0, max(0.0, math.exp(logpre) * h))


def reg_lower_gamma_p(k: float, x: float) -> float:
    """Regularized lower incomplete gamma P(k, x) = 1 - Q(k, x).

    Evaluated directly (not as ``1 - Q``) so tiny values keep full precision.
    """
    _check_gamma_args(k, x)
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return 1.0
    if x < k + 1.0:
        logpre, s = _lower_series(k, x)
        return min(1.0, math.exp(logpre) * s)
    return 1.0 - reg_upper_gamma_q(k, x)


def log_reg_lower_gamma_p(k: float, x: float) -> float:
    """ln P(k, x); stays finite where P itself underflows (x << k)."""
    _check_gamma_args(k, x)
    if x == 0.0:
        return -math.inf
    if x < k + 1.0:
        logpre, s = _lower_series(k, x)
        return logpre + math.log(s)
    return math.log1p(-reg_upper_gamma_q(k, x))


def kummer_half_series(x: float, terms: int | None = None) -> float:
    """Power series for 1F1(-1/2; 1; -x), summed in Kummer-transformed form.

    1F1(-1/2; 1; -x) = exp(-x) 1F1(3/2; 1; x); the transformed series has
    positive terms only, so there is no cancellation at moderate x. With
    ``terms`` given the sum is truncated there, otherwise it runs to
    machine precision.
    """
    if x == 0.0:
        return 1.0
    term = 1.0
    total = 1.0
    j = 0
    limit = terms if terms is not None else _MAX_ITER
    while j + 1 < limit:
        term *= (1.5 + j) / (1.0 + j) * x / (j + 1.0)
        total += term
        j += 1
        if terms is None and term < _EPS * total:
            break
    return math.exp(-x) * total


def kummer_half_bessel(x: float) -> float:
    """1F1(-1/2; 1; -x) = exp(-x/2) [(1 + x) I0(x/2) + x I1(x/2)]."""
    half = 0.5 * x
    # ive(n, h) = exp(-h) In(h), which absorbs the exp(-x/2) factor
    return (1.0 + x) * float(ive(0, half)) + x * float(ive(1, half))


def kummer_half(x: float) -> float:
    """Kummer function 1F1(-1/2; 1; -x) for x >= 0.

    This is the factor linking a Rician envelope's mean to its K-factor.
    """
    if not x >= 0:
        raise ValueError(f"kummer_half requires x >= 0, got {x}")
    if x < _KUMMER_SWITCH:
        return kummer_half_series(x)
    return kummer_half_bessel(x)


@lru_cache(maxsize=32)
def _legendre_nodes(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(n)


def _composite_legendre(f, lo: float, hi: float, panels: int, nodes: int) -> float:
    x, wts = _legendre_nodes(nodes)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    pts = mid[:, None] + half[:, None] * x[None, :]
    return float(np.sum(half[:, None] * wts[None, :] * f(pts)))


def expected_log1p_gamma(k: float, w: float, quad: QuadratureSpec | None = None) -> float:
    """E[ln(1 + G)] in nats for G ~ Gamma(shape=k, scale=w).

    Uses the Laplace-transform identity

        E[ln(1+G)] = int_0^inf exp(-s)/s * (1 - (1 + w s)^(-k)) ds

    in the variable u = ln s, integrated with composite Gauss-Legendre
    panels that are doubled until two passes agree to the requested tolerance.
    Dividing the result by ln 2 gives the rate in bits.
    """
    quad = quad or QuadratureSpec()
    if not k > 0:
        raise ValueError(f"shape must be positive, got {k}")
    if not w >= 0:
        raise ValueError(f"scale must be nonnegative, got {w}")
    if w == 0.0:
        return 0.0
    kw = k * w

    def integrand(u):
        s = np.exp(u)
        return np.exp(-s) * -np.expm1(-k * np.log1p(w * s))

    # left tail beyond lo contributes about k*w*exp(lo); right tail exp(-exp(hi))
    lo = -math.log(kw) - 40.0
    hi = math.log(60.0)
    panels = 8
    prev = _composite_legendre(integrand, lo, hi, panels, quad.node_count)
    change = math.inf
    for _ in range(quad.max_refinements):
        panels *= 2
        cur = _composite_legendre(integrand, lo, hi, panels, quad.node_count)
        change = abs(cur - prev)
        if change <= quad.relative_tolerance * abs(cur):
            return cur
        prev = cur
    raise QuadratureError(
        f"expected_log1p_gamma(k={k}, w={w}) did not reach rtol={quad.relative_tolerance}",
        estimate=prev,
        error=change,
    )
