"""
Scalar logarithmic mean, its classical bounds and the Riemann-type sum families.

All two-variable functions take a PositivePair (or an (a, b) tuple) and are
homogeneous of degree one. One-variable families take t = a/b with b = 1.
"""
import math
import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

logger = logging.getLogger(__name__)

# |a - b| / min(a, b) below this uses the series for L
DIAGONAL_SERIES_THRESHOLD = 1e-8
# |t - 1| above this uses the closed forms of alpha_m / beta_m
CLOSED_FORM_THRESHOLD = 1e-6

FORMS = ("auto", "closed", "sum")


@dataclass(frozen=True)
class PositivePair:
    """Arguments (a, b) of a two-variable mean; both strictly positive."""
    a: float
    b: float

    def __post_init__(self):
        for name in ("a", "b"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float, np.floating, np.integer)) and math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a positive finite real, got {value!r}")
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))

    @property
    def ratio(self) -> float:
        return self.a / self.b

    def scaled(self, factor: float) -> "PositivePair":
        return PositivePair(self.a * factor, self.b * factor)


@dataclass(frozen=True)
class BoundOrder:
    """Order m >= 1 of a sum family."""
    m: int

    def __post_init__(self):
        if isinstance(self.m, bool) or not isinstance(self.m, (int, np.integer)):
            raise ValueError(f"order m must be an integer, got {self.m!r}")
        if self.m < 1:
            raise ValueError(f"order m must be >= 1, got {self.m}")
        object.__setattr__(self, "m", int(self.m))

    def require(self, minimum: int) -> int:
        if self.m < minimum:
            raise ValueError(f"order m must be >= {minimum} here, got {self.m}")
        return self.m


def as_pair(p) -> PositivePair:
    if isinstance(p, PositivePair):
        return p
    a, b = p
    return PositivePair(a, b)


def _order(m, minimum: int = 1) -> int:
    order = m if isinstance(m, BoundOrder) else BoundOrder(m)
    return order.require(minimum)


def _positive(t: float, name: str = "t") -> float:
    if not (math.isfinite(t) and t > 0):
        raise ValueError(f"{name} must be a positive finite real, got {t!r}")
    return float(t)


# ---------------------------------------------------------------------------
# Two-variable means

def log_mean(p) -> float:
    """
    L(a, b) = (a - b) / (log a - log b), with L(a, a) = a.

    Evaluated as lo * d / log1p(d) with d = (hi - lo) / lo >= 0, switching
    to lo * (1 + d/2 - d^2/12) when d < DIAGONAL_SERIES_THRESHOLD. When
    hi / lo overflows the plain quotient of logarithms is used.
    """
    p = as_pair(p)
    lo, hi = min(p.a, p.b), max(p.a, p.b)
    if lo == hi:
        return lo
    d = (hi - lo) / lo
    if not math.isfinite(d):
        return (hi - lo) / (math.log(hi) - math.log(lo))
    if d < DIAGONAL_SERIES_THRESHOLD:
        return lo * (1.0 + d / 2.0 - d * d / 12.0)
    return lo * d / math.log1p(d)


def log_mean_array(a, b) -> np.ndarray:
    """
    Broadcasting L(a, b) on nonnegative arrays.

    Limit values are used on the boundary: L(x, 0) = L(0, y) = L(0, 0) = 0.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        d = (hi - lo) / lo
        general = np.where(np.isfinite(d), lo * d / np.log1p(d), (hi - lo) / (np.log(hi) - np.log(lo)))
        series = lo * (1.0 + d / 2.0 - d * d / 12.0)
        out = np.where(d < DIAGONAL_SERIES_THRESHOLD, series, general)
    out = np.where(lo == hi, lo, out)
    return np.where(lo > 0, out, 0.0)


def geo_mean(p) -> float:
    p = as_pair(p)
    return math.sqrt(p.a) * math.sqrt(p.b)


def arith_mean(p) -> float:
    p = as_pair(p)
    return p.a / 2.0 + p.b / 2.0


def lin_upper(p) -> float:
    """((a^{1/3} + b^{1/3}) / 2)^3."""
    p = as_pair(p)
    return ((p.a ** (1.0 / 3.0) + p.b ** (1.0 / 3.0)) / 2.0) ** 3


def polya_upper(p) -> float:
    """(2/3) sqrt(ab) + (1/3) (a + b) / 2."""
    return 2.0 / 3.0 * geo_mean(p) + arith_mean(p) / 3.0


def rational_lower(p) -> float:
    """
    b (t + t^{1/3}) / (1 + t^{1/3}) with t = a/b; lies between sqrt(ab) and L(a, b).

    Evaluated as x y (x^2 + y^2) / (x + y) with x = a^{1/3}, y = b^{1/3}, so
    no intermediate exceeds max(a, b).
    """
    p = as_pair(p)
    x, y = p.a ** (1.0 / 3.0), p.b ** (1.0 / 3.0)
    return x * y * ((x * x + y * y) / (x + y))


# ---------------------------------------------------------------------------
# One-variable sum families

def _check_form(form: str) -> str:
    if form not in FORMS:
        raise ValueError(f"form must be one of {FORMS}, got {form!r}")
    return form


def _use_closed(t: float, form: str) -> bool:
    if form == "closed":
        if t == 1.0:
            raise ValueError("closed forms are undefined at t = 1")
        return True
    return form == "auto" and abs(t - 1.0) > CLOSED_FORM_THRESHOLD


def _root_minus_one(t: float, m: int) -> float:
    """t^{1/m} - 1 without cancellation."""
    return math.expm1(math.log(t) / m)


def alpha_m(t: float, m, form: str = "auto") -> float:
    """(1/m) sum_{k=1}^m t^{(2k-1)/(2m)}: midpoint sums, increasing to L(t, 1)."""
    t, m = _positive(t), _order(m)
    if t == 1.0 and form != "closed":
        return 1.0
    if _use_closed(t, _check_form(form)):
        return t ** (1.0 / (2 * m)) * (t - 1.0) / (m * _root_minus_one(t, m))
    return math.fsum(t ** ((2 * k - 1) / (2 * m)) for k in range(1, m + 1)) / m


def beta_m(t: float, m, form: str = "auto") -> float:
    """(1/m)(sum_{k=0}^m t^{k/m} - (t + 1)/2): trapezoid sums, decreasing to L(t, 1)."""
    t, m = _positive(t), _order(m)
    if t == 1.0 and form != "closed":
        return 1.0
    if _use_closed(t, _check_form(form)):
        r = _root_minus_one(t, m)
        return (r + 2.0) * (t - 1.0) / (2 * m * r)
    terms = [t ** (k / m) for k in range(m + 1)]
    terms.append(-(t + 1.0) / 2.0)
    return math.fsum(terms) / m


def gamma_m(t: float, m) -> float:
    """Right Riemann sum (1/m) sum_{k=1}^m t^{k/m}."""
    t, m = _positive(t), _order(m)
    return math.fsum(t ** (k / m) for k in range(1, m + 1)) / m


def delta_m(t: float, m) -> float:
    """Left Riemann sum (1/m) sum_{k=0}^{m-1} t^{k/m}."""
    t, m = _positive(t), _order(m)
    return math.fsum(t ** (k / m) for k in range(m)) / m


# ---------------------------------------------------------------------------
# Two-variable sum families

def _pair_power_mean(p: PositivePair, exponents: Sequence[float]) -> float:
    """Average of a^e b^{1-e}; every term lies between min(a, b) and max(a, b)."""
    n = len(exponents)
    return math.fsum(p.a ** e * p.b ** (1.0 - e) / n for e in exponents)


def lower_sum_pair(p, m) -> float:
    """(1/m) sum_{k=1}^m a^{(2k-1)/(2m)} b^{(2m-(2k-1))/(2m)}."""
    p, m = as_pair(p), _order(m)
    return _pair_power_mean(p, [(2 * k - 1) / (2 * m) for k in range(1, m + 1)])


def mid_sum_pair(p, m) -> float:
    """(1/m) sum_{k=1}^m a^{k/(m+1)} b^{(m+1-k)/(m+1)}."""
    p, m = as_pair(p), _order(m)
    return _pair_power_mean(p, [k / (m + 1) for k in range(1, m + 1)])


def upper_sum_pair(p, m) -> float:
    """(1/m) sum_{k=0}^{m-1} a^{k/(m-1)} b^{(m-1-k)/(m-1)}; needs m >= 2."""
    p, m = as_pair(p), _order(m, minimum=2)
    return _pair_power_mean(p, [k / (m - 1) for k in range(m)])


# ---------------------------------------------------------------------------
# Integer-exponent expressions

def int_power(x: float, n: int) -> float:
    """x**n by repeated squaring; overflows to inf instead of raising."""
    if n < 0:
        raise ValueError(f"exponent must be nonnegative, got {n}")
    result, base = 1.0, float(x)
    while n:
        if n & 1:
            result *= base
        n >>= 1
        if n:
            base *= base
    return result


def power_scale(x: float, max_exponent: int, terms: int = 1) -> float:
    """Magnitude bound terms * max(1, x**max_exponent) used to normalize gaps."""
    return terms * max(1.0, int_power(x, max_exponent))


def _signed_sum(terms: Sequence[float]) -> float:
    if not all(math.isfinite(v) for v in terms):
        return math.nan
    try:
        return math.fsum(terms)
    except OverflowError:
        return math.nan


def _nonneg_int(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 0:
        raise ValueError(f"{name} must be a nonnegative integer, got {value!r}")
    return int(value)


def lemma2_expr(x: float, u: int, v: int, w: int) -> float:
    """x^u (1 - x^v) + x^w (x^v - 1); nonnegative whenever w >= u. NaN on overflow."""
    x = _positive(x, "x")
    u, v, w = (_nonneg_int(val, name) for val, name in ((u, "u"), (v, "v"), (w, "w")))
    if w < u:
        raise ValueError(f"requires w >= u, got u={u}, w={w}")
    return _signed_sum([
        int_power(x, u), -int_power(x, u + v),
        int_power(x, w + v), -int_power(x, w),
    ])


def lemma3_gap(x: float, m) -> float:
    """sum_k x^{(2k-1)(m+1)} - sum_k x^{2km}, k = 1..m."""
    x, m = _positive(x, "x"), _order(m)
    terms = [int_power(x, (2 * k - 1) * (m + 1)) for k in range(1, m + 1)]
    terms += [-int_power(x, 2 * k * m) for k in range(1, m + 1)]
    return _signed_sum(terms)


def lemma5_gap(x: float, m) -> float:
    """sum_{k=1}^{m-1} (x^{km} - x^{k(m-1)}) - (x^{m(m-1)} - 1)/2; needs m >= 2."""
    x, m = _positive(x, "x"), _order(m, minimum=2)
    terms = []
    for k in range(1, m):
        terms += [int_power(x, k * m), -int_power(x, k * (m - 1))]
    terms += [-int_power(x, m * (m - 1)) / 2.0, 0.5]
    return _signed_sum(terms)


def induction_gap(t: float, m) -> float:
    """m (t^{m-1} + 1)/2 - sum_{k=0}^{m-1} t^k; needs m >= 2."""
    t, m = _positive(t), _order(m, minimum=2)
    top = int_power(t, m - 1)
    terms = [m * top / 2.0, m / 2.0]
    terms += [-int_power(t, k) for k in range(m)]
    return _signed_sum(terms)


# ---------------------------------------------------------------------------
# Convergence

@dataclass(frozen=True)
class ConvergenceProfile:
    t: float
    orders: tuple[int, ...]
    alpha_errors: tuple[float, ...]
    beta_errors: tuple[float, ...]
    alpha_slope: float
    beta_slope: float


def fit_order(orders: Sequence[int], errors: Sequence[float]) -> float:
    """Least-squares slope of -log(error) against log(m)."""
    slope, _ = np.polyfit(np.log(np.asarray(orders, dtype=float)),
                          -np.log(np.asarray(errors, dtype=float)), 1)
    return float(slope)


def convergence_profile(t: float, orders: Iterable[int] = (8, 16, 32, 64)) -> ConvergenceProfile:
    """Errors |alpha_m - L| and |beta_m - L| over the given orders plus fitted convergence orders."""
    t = _positive(t)
    if t == 1.0:
        raise ValueError("convergence is undefined at t = 1 (all errors vanish)")
    orders = tuple(_order(m) for m in orders)
    if len(orders) < 2:
        raise ValueError("need at least two orders to fit a slope")
    target = log_mean((t, 1.0))
    alpha_err = tuple(abs(alpha_m(t, m) - target) for m in orders)
    beta_err = tuple(abs(beta_m(t, m) - target) for m in orders)
    profile = ConvergenceProfile(
        t=t, orders=orders, alpha_errors=alpha_err, beta_errors=beta_err,
        alpha_slope=fit_order(orders, alpha_err), beta_slope=fit_order(orders, beta_err),
    )
    logger.debug("Convergence at t=%s: alpha slope %.4f, beta slope %.4f",
                 t, profile.alpha_slope, profile.beta_slope)
    return profile
