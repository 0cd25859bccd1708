"""
Independent reference evaluations: quadrature of the nu-integrals and
term-by-term summation of the finite sums.

Nothing here calls the closed forms or the Hadamard-multiplier maps of
scalar_means / matrix_core, so agreement between the two is evidence.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss

from matrix_core import DimensionMismatchError, HermitianPSD, as_matrix, frac_power, hermitian_part
from scalar_means import int_power

logger = logging.getLogger(__name__)

DEFAULT_POINTS = 64
MAX_BRUTE_ORDER = 64


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Nodes and weights on [0, 1]; weights sum to 1."""
    kind: str
    points: int
    nodes: np.ndarray
    weights: np.ndarray

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))


@lru_cache(maxsize=None)
def gauss_legendre(points: int = DEFAULT_POINTS) -> QuadratureRule:
    """Gauss-Legendre rule mapped from [-1, 1] to [0, 1]; exact for degree <= 2*points - 1."""
    if points < 2:
        raise ValueError(f"points must be >= 2, got {points}")
    x, w = leggauss(points)
    nodes, weights = (x + 1.0) / 2.0, w / 2.0
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule("gauss_legendre", points, nodes, weights)


@lru_cache(maxsize=None)
def composite_simpson(panels: int) -> QuadratureRule:
    """Composite Simpson rule with `panels` parabolic panels (2*panels + 1 points)."""
    if panels < 1:
        raise ValueError(f"panels must be >= 1, got {panels}")
    n = 2 * panels
    h = 1.0 / n
    nodes = np.arange(n + 1) * h
    weights = np.full(n + 1, 2.0)
    weights[1::2] = 4.0
    weights[0] = weights[-1] = 1.0
    weights *= h / 3.0
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule("composite_simpson", n + 1, nodes, weights)


def quad_scalar_integral(t: float, rule: QuadratureRule | None = None) -> float:
    """sum_i w_i t^{x_i}, approximating int_0^1 t^nu dnu = L(t, 1)."""
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    rule = rule or gauss_legendre()
    return rule.integrate(np.power(float(t), rule.nodes))


def quad_matrix_integral(A: HermitianPSD, B: HermitianPSD, X,
                         rule: QuadratureRule | None = None) -> np.ndarray:
    """sum_i w_i A^{x_i} X B^{1-x_i}."""
    rule = rule or gauss_legendre()
    if B.dim != A.dim:
        raise DimensionMismatchError(f"dimension mismatch: {A.dim} vs {B.dim}")
    X = as_matrix(X, A.dim)
    total = np.zeros_like(X)
    for x, w in zip(rule.nodes, rule.weights):
        total += w * (frac_power(A, x).entries @ X @ frac_power(B, 1.0 - x).entries)
    return total


def quad_geomean_integral(A: HermitianPSD, B: HermitianPSD,
                          rule: QuadratureRule | None = None) -> np.ndarray:
    """sum_i w_i A^{1/2} (A^{-1/2} B A^{-1/2})^{x_i} A^{1/2}, built from frac_power alone."""
    rule = rule or gauss_legendre()
    if B.dim != A.dim:
        raise DimensionMismatchError(f"dimension mismatch: {A.dim} vs {B.dim}")
    a_half = frac_power(A, 0.5).entries
    a_inv_half = frac_power(A, -0.5).entries
    T = HermitianPSD.project(a_inv_half @ B.entries @ a_inv_half)
    total = np.zeros((A.dim, A.dim), dtype=np.complex128)
    for x, w in zip(rule.nodes, rule.weights):
        total += w * (a_half @ frac_power(T, float(x)).entries @ a_half)
    return hermitian_part(total)


class KahanSummation:
    """Running compensated sum (Neumaier's variant of Kahan summation)."""

    def __init__(self):
        self.sum = 0.0
        self.carry = 0.0

    def add(self, value: float) -> None:
        value = float(value)
        total = self.sum + value
        if abs(self.sum) >= abs(value):
            self.carry += (self.sum - total) + value
        else:
            self.carry += (value - total) + self.sum
        self.sum = total

    @property
    def value(self) -> float:
        return self.sum + self.carry


class SumSpec(str, Enum):
    ALPHA = "alpha"
    BETA = "beta"
    GAMMA = "gamma"
    DELTA = "delta"
    LEMMA3 = "lemma3"
    LEMMA5 = "lemma5"
    INDUCTION = "induction"


def _terms(spec: SumSpec, t: float, m: int):
    if spec is SumSpec.ALPHA:
        return [t ** ((2 * k - 1) / (2 * m)) / m for k in range(1, m + 1)]
    if spec is SumSpec.BETA:
        return [t ** (k / m) / m for k in range(m + 1)] + [-(t + 1.0) / (2 * m)]
    if spec is SumSpec.GAMMA:
        return [t ** (k / m) / m for k in range(1, m + 1)]
    if spec is SumSpec.DELTA:
        return [t ** (k / m) / m for k in range(m)]
    if spec is SumSpec.LEMMA3:
        return ([int_power(t, (2 * k - 1) * (m + 1)) for k in range(1, m + 1)]
                + [-int_power(t, 2 * k * m) for k in range(1, m + 1)])
    if m < 2:
        raise ValueError(f"{spec.value} needs m >= 2, got {m}")
    if spec is SumSpec.LEMMA5:
        terms = []
        for k in range(1, m):
            terms += [int_power(t, k * m), -int_power(t, k * (m - 1))]
        return terms + [-int_power(t, m * (m - 1)) / 2.0, 0.5]
    return [m * int_power(t, m - 1) / 2.0, m / 2.0] + [-int_power(t, k) for k in range(m)]


def brute_sum(spec: SumSpec | str, t: float, m: int) -> float:
    """
    Term-by-term compensated evaluation of one of the finite sums.

    Integer powers overflow to inf rather than raising; a sum with a
    non-finite term or total is NaN.
    """
    spec = SumSpec(spec)
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    if not 1 <= m <= MAX_BRUTE_ORDER:
        raise ValueError(f"m must lie in [1, {MAX_BRUTE_ORDER}], got {m}")
    terms = _terms(spec, float(t), int(m))
    if not all(math.isfinite(term) for term in terms):
        logger.debug("brute_sum(%s, %s, %s): non-finite term", spec.value, t, m)
        return math.nan
    acc = KahanSummation()
    for term in terms:
        acc.add(term)
    return acc.value if math.isfinite(acc.value) else math.nan
