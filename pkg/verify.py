"""
Seeded instances and the catalog of inequality checks.

Every check evaluates one inequality chain and returns the signed margin of
each link (upper side minus lower side) together with the tolerance the
margin is compared against. Nothing here aborts on a failing link: failures
are collected into a Report that names the instance by fingerprint, and the
instance can be rebuilt from the batch seed and the trial index.
"""
import hashlib
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np

from config import VERSION, Tolerances
from matrix_core import (DimensionMismatchError, GeomeanPencil, HermitianPSD, SpecialTerm, as_matrix,
                         frobenius_norm, log_mean_map, loewner_gap, mean_combination, power_sum_map)
from scalar_means import (PositivePair, alpha_m, arith_mean, as_pair, beta_m, delta_m, gamma_m,
                          geo_mean, induction_gap, lemma2_expr, lemma3_gap, lemma5_gap, lin_upper,
                          log_mean, lower_sum_pair, mid_sum_pair, polya_upper, power_scale,
                          rational_lower, upper_sum_pair)
from utils import MASK64, derive_seed, fingerprint, log_grid

logger = logging.getLogger(__name__)

X_KINDS = ("gaussian_complex", "identity", "rank_one")
MAX_DIM = 16
DEFAULT_MAX_DIM = 8
DEFAULT_EIG_RANGE = (1e-3, 1e3)
DEFAULT_PD_EIG_RANGE = (1e-2, 1e2)
LEMMA_X_RANGE = (1e-3, 1e3)
LOWER_ORDERS = (1, 2, 3, 5, 10, 32)
UPPER_ORDERS = (2, 3, 5, 10, 32)
APPENDIX_MAX_ORDER = 64
LEMMA_TOLERANCE = 1e-9

UPPER_VARIANTS = ("ax_plus_xb", "ax_plus_bx")
PROPS41_COEFFICIENTS = {"polya": 1.0 / 3.0, "printed": 1.0 / 2.0}

REPORT_COLUMNS = ("check_id", "link", "evaluations", "failures", "skipped", "worst_margin", "worst_ratio")


class UnknownCheckError(KeyError):
    pass


# ---------------------------------------------------------------------------
# Instances

@dataclass(frozen=True)
class InstanceSpec:
    """
    How to draw a MeanTriple.

    dim=None draws the dimension per instance from 1..DEFAULT_MAX_DIM.
    Eigenvalues are log-uniform in eig_range; without require_pd each
    eigenvalue is zeroed with probability 1/4.
    """
    seed: int = 42
    dim: int | None = None
    eig_range: tuple[float, float] = DEFAULT_EIG_RANGE
    require_pd: bool = True
    x_kind: str = "gaussian_complex"

    def __post_init__(self):
        lo, hi = self.eig_range
        if not (lo > 0 and hi >= lo and math.isfinite(hi)):
            raise ValueError(f"eig_range must satisfy 0 < lo <= hi, got {self.eig_range}")
        if self.dim is not None and not 1 <= self.dim <= MAX_DIM:
            raise ValueError(f"dim must lie in [1, {MAX_DIM}], got {self.dim}")
        if self.x_kind not in X_KINDS:
            raise ValueError(f"x_kind must be one of {X_KINDS}, got {self.x_kind!r}")
        object.__setattr__(self, "seed", int(self.seed) & MASK64)
        object.__setattr__(self, "eig_range", (float(lo), float(hi)))


@dataclass(frozen=True, eq=False)
class MeanTriple:
    A: HermitianPSD
    B: HermitianPSD
    X: np.ndarray

    def __post_init__(self):
        X = np.array(as_matrix(self.X, self.A.dim))
        if self.B.dim != self.A.dim:
            raise DimensionMismatchError(f"A and B dimensions differ: {self.A.dim} vs {self.B.dim}")
        X.setflags(write=False)
        object.__setattr__(self, "X", X)

    @property
    def dim(self) -> int:
        return self.A.dim

    @cached_property
    def fingerprint(self) -> str:
        return fingerprint(self.A.entries, self.B.entries, self.X)


def _complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)


def haar_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-distributed unitary from the QR factorization of a complex Gaussian matrix."""
    Q, R = np.linalg.qr(_complex_gaussian(rng, (n, n)))
    d = np.diagonal(R)
    return Q * (d / np.abs(d))


def _random_psd(rng: np.random.Generator, n: int, spec: InstanceSpec) -> HermitianPSD:
    lo, hi = spec.eig_range
    lam = np.exp(rng.uniform(math.log(lo), math.log(hi), n))
    if not spec.require_pd:
        lam[rng.random(n) < 0.25] = 0.0
    Q = haar_unitary(rng, n)
    return HermitianPSD((Q * lam) @ Q.conj().T)


def gen_instance(spec: InstanceSpec) -> MeanTriple:
    """Deterministic MeanTriple for spec.seed."""
    rng = np.random.default_rng(spec.seed)
    n = spec.dim if spec.dim is not None else int(rng.integers(1, DEFAULT_MAX_DIM + 1))
    A = _random_psd(rng, n, spec)
    B = _random_psd(rng, n, spec)
    if spec.x_kind == "identity":
        X = np.eye(n, dtype=np.complex128)
    elif spec.x_kind == "rank_one":
        X = np.outer(_complex_gaussian(rng, n), _complex_gaussian(rng, n).conj())
    else:
        X = _complex_gaussian(rng, (n, n))
    return MeanTriple(A, B, X)


# ---------------------------------------------------------------------------
# Results

@dataclass(frozen=True)
class Link:
    label: str
    margin: float
    tolerance: float

    @property
    def skipped(self) -> bool:
        return not math.isfinite(self.margin)

    @property
    def passed(self) -> bool:
        return self.skipped or self.margin >= -self.tolerance


@dataclass(frozen=True)
class CheckResult:
    check_id: str
    links: tuple[Link, ...]
    instance_fingerprint: str
    order: int | None = None

    @property
    def passed(self) -> bool:
        return all(link.passed for link in self.links)

    @property
    def skipped(self) -> bool:
        return any(link.skipped for link in self.links)

    def margins(self) -> dict[str, float]:
        return {link.label: link.margin for link in self.links}


def _ascending(check_id: str, fp: str, chain: Sequence[tuple[str, float]], tolerance: float,
               order: int | None = None) -> CheckResult:
    """Links for chain[0] <= chain[1] <= ...; margin = upper - lower."""
    links = tuple(
        Link(f"{lower_label}<={upper_label}", float(upper - lower), tolerance)
        for (lower_label, lower), (upper_label, upper) in zip(chain, chain[1:])
    )
    return CheckResult(check_id, links, fp, order)


def _pair_fingerprint(p: PositivePair, *extra) -> str:
    return fingerprint(np.array([p.a, p.b]), *extra)


# ---------------------------------------------------------------------------
# Scalar chains

def beta_form(p, m: int) -> float:
    """(1/m)(sum_{k=0}^m a^{k/m} b^{(m-k)/m} - (a + b)/2), the two-variable trapezoid sum."""
    p = as_pair(p)
    return p.b * beta_m(p.ratio, m)


def _scalar_tolerance(p: PositivePair, tol: float) -> float:
    return tol * max(p.a, p.b)


def check_scalar_chain_lemma1(p, tol: float = Tolerances.scalar) -> CheckResult:
    p = as_pair(p)
    return _ascending("lemma1", _pair_fingerprint(p), [
        ("log_mean", log_mean(p)), ("lin_upper", lin_upper(p)), ("polya_upper", polya_upper(p)),
    ], _scalar_tolerance(p, tol))


def check_lin_chain(p, tol: float = Tolerances.scalar) -> CheckResult:
    p = as_pair(p)
    return _ascending("lin_chain", _pair_fingerprint(p), [
        ("geo_mean", geo_mean(p)), ("log_mean", log_mean(p)), ("lin_upper", lin_upper(p)),
    ], _scalar_tolerance(p, tol))


def check_lower_sum_chain(p, m: int, tol: float = Tolerances.scalar) -> CheckResult:
    p = as_pair(p)
    return _ascending("lower_sum_chain", _pair_fingerprint(p, m), [
        ("geo_mean", geo_mean(p)), ("mid_sum", mid_sum_pair(p, m)),
        ("lower_sum", lower_sum_pair(p, m)), ("log_mean", log_mean(p)),
    ], _scalar_tolerance(p, tol), m)


def check_upper_sum_chain(p, m: int, tol: float = Tolerances.scalar) -> CheckResult:
    p = as_pair(p)
    return _ascending("upper_sum_chain", _pair_fingerprint(p, m), [
        ("log_mean", log_mean(p)), ("beta_form", beta_form(p, m)),
        ("upper_sum", upper_sum_pair(p, m)), ("arith_mean", arith_mean(p)),
    ], _scalar_tolerance(p, tol), m)


def check_rational_lower_chain(p, tol: float = Tolerances.scalar) -> CheckResult:
    p = as_pair(p)
    return _ascending("rational_lower", _pair_fingerprint(p), [
        ("geo_mean", geo_mean(p)), ("rational_lower", rational_lower(p)), ("log_mean", log_mean(p)),
    ], _scalar_tolerance(p, tol))


# ---------------------------------------------------------------------------
# Integer-exponent lemmas; margins are gaps normalized by the largest term

def _lemma_result(check_id: str, gap: float, scale: float, fp: str, tol: float,
                  order: int | None = None) -> CheckResult:
    margin = gap / scale if math.isfinite(scale) else math.nan
    return CheckResult(check_id, (Link(f"{check_id}>=0", margin, tol),), fp, order)


def check_lemma2(x: float, u: int, v: int, w: int, tol: float = LEMMA_TOLERANCE) -> CheckResult:
    gap = lemma2_expr(x, u, v, w)
    scale = power_scale(x, max(u, w) + v, 4)
    return _lemma_result("lemma2", gap, scale, fingerprint(np.array([x]), np.array([u, v, w])), tol)


def check_lemma3(x: float, m: int, tol: float = LEMMA_TOLERANCE) -> CheckResult:
    gap = lemma3_gap(x, m)
    scale = power_scale(x, 2 * m * m + m - 1, 2 * m)
    return _lemma_result("lemma3", gap, scale, fingerprint(np.array([x]), m), tol, m)


def check_lemma5(x: float, m: int, tol: float = LEMMA_TOLERANCE) -> CheckResult:
    gap = lemma5_gap(x, m)
    scale = power_scale(x, m * (m - 1), 2 * m)
    return _lemma_result("lemma5", gap, scale, fingerprint(np.array([x]), m), tol, m)


def check_induction(t: float, m: int, tol: float = LEMMA_TOLERANCE) -> CheckResult:
    gap = induction_gap(t, m)
    scale = power_scale(t, m - 1, 2 * m)
    return _lemma_result("induction", gap, scale, fingerprint(np.array([t]), m), tol, m)


# ---------------------------------------------------------------------------
# Frobenius-norm chains

def _frobenius_tolerance(tr: MeanTriple, tol: float) -> float:
    return tol * frobenius_norm(tr.X) * max(1.0, frobenius_norm(tr.A), frobenius_norm(tr.B))


def _integral_norm(tr: MeanTriple) -> float:
    return frobenius_norm(log_mean_map(tr.A, tr.B, tr.X))


def _sum_norm(tr: MeanTriple, exponents, weight: float = 1.0, coefficients=None) -> float:
    return frobenius_norm(power_sum_map(tr.A, tr.B, tr.X, exponents, weight, coefficients))


def _half_norm(tr: MeanTriple) -> float:
    return _sum_norm(tr, [0.5])


def _polya_norm(tr: MeanTriple) -> float:
    return _sum_norm(tr, [0.5, 1.0, 0.0], coefficients=[2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0])


def _lin_norm(tr: MeanTriple) -> float:
    return _sum_norm(tr, [1.0, 2.0 / 3.0, 1.0 / 3.0, 0.0], coefficients=[1 / 8, 3 / 8, 3 / 8, 1 / 8])


def _lower_norm(tr: MeanTriple, m: int) -> float:
    return _sum_norm(tr, [(2 * k - 1) / (2 * m) for k in range(1, m + 1)], 1.0 / m)


def _mid_norm(tr: MeanTriple, m: int) -> float:
    return _sum_norm(tr, [k / (m + 1) for k in range(1, m + 1)], 1.0 / m)


def _beta_norm(tr: MeanTriple, m: int) -> float:
    coefficients = [0.5] + [1.0] * (m - 1) + [0.5]
    return _sum_norm(tr, [k / m for k in range(m + 1)], 1.0 / m, coefficients)


def _upper_norm(tr: MeanTriple, m: int) -> float:
    return _sum_norm(tr, [k / (m - 1) for k in range(m)], 1.0 / m)


def _arith_norm(tr: MeanTriple, variant: str = "ax_plus_xb") -> float:
    if variant == "ax_plus_xb":
        return _sum_norm(tr, [1.0, 0.0], 0.5)
    if variant == "ax_plus_bx":
        return frobenius_norm((tr.A.entries + tr.B.entries) @ tr.X) / 2.0
    raise ValueError(f"upper variant must be one of {UPPER_VARIANTS}, got {variant!r}")


def _require_order(m: int, minimum: int) -> int:
    if isinstance(m, bool) or not isinstance(m, (int, np.integer)) or m < minimum:
        raise ValueError(f"order m must be an integer >= {minimum}, got {m!r}")
    return int(m)


def check_frobenius_zou(tr: MeanTriple, tol: float = Tolerances.matrix) -> CheckResult:
    return _ascending("zou", tr.fingerprint, [
        ("log_mean", _integral_norm(tr)), ("polya_upper", _polya_norm(tr)),
    ], _frobenius_tolerance(tr, tol))


def check_frobenius_refined_upper(tr: MeanTriple, tol: float = Tolerances.matrix) -> CheckResult:
    return _ascending("refined_upper", tr.fingerprint, [
        ("log_mean", _integral_norm(tr)), ("lin_upper", _lin_norm(tr)), ("polya_upper", _polya_norm(tr)),
    ], _frobenius_tolerance(tr, tol))


def check_frobenius_lower_chain(tr: MeanTriple, m: int, tol: float = Tolerances.matrix) -> CheckResult:
    m = _require_order(m, 1)
    return _ascending("lower_chain", tr.fingerprint, [
        ("geo_mean", _half_norm(tr)), ("mid_sum", _mid_norm(tr, m)),
        ("lower_sum", _lower_norm(tr, m)), ("log_mean", _integral_norm(tr)),
    ], _frobenius_tolerance(tr, tol), m)


def check_frobenius_upper_chain(tr: MeanTriple, m: int, tol: float = Tolerances.matrix,
                                variant: str = "ax_plus_xb") -> CheckResult:
    """
    The final link compares against (1/2)||AX + XB||_F by default;
    variant="ax_plus_bx" uses (1/2)||AX + BX||_F instead.
    """
    m = _require_order(m, 2)
    return _ascending("upper_chain", tr.fingerprint, [
        ("log_mean", _integral_norm(tr)), ("beta_form", _beta_norm(tr, m)),
        ("upper_sum", _upper_norm(tr, m)), ("arith_mean", _arith_norm(tr, variant)),
    ], _frobenius_tolerance(tr, tol), m)


def check_hk_chains(tr: MeanTriple, m: int, tol: float = Tolerances.matrix) -> CheckResult:
    """Lower pair of links for every m >= 1; the upper pair is added when m >= 2."""
    m = _require_order(m, 1)
    tolerance = _frobenius_tolerance(tr, tol)
    integral = _integral_norm(tr)
    lower = _ascending("hk_chains", tr.fingerprint, [
        ("geo_mean", _half_norm(tr)), ("mid_sum", _mid_norm(tr, m)), ("log_mean", integral),
    ], tolerance, m)
    if m < 2:
        return lower
    upper = _ascending("hk_chains", tr.fingerprint, [
        ("log_mean", integral), ("upper_sum", _upper_norm(tr, m)), ("arith_mean", _arith_norm(tr)),
    ], tolerance, m)
    return replace(lower, links=lower.links + upper.links)


def lower_chain_profile(tr: MeanTriple, orders: Iterable[int]) -> list[float]:
    """(1/m)||sum_k A^{(2k-1)/(2m)} X B^{...}||_F for each order, in the given order."""
    return [_lower_norm(tr, _require_order(m, 1)) for m in orders]


# ---------------------------------------------------------------------------
# Loewner-order chains of weighted geometric means

def _loewner_chain(check_id: str, fp: str, chain: Sequence[tuple[str, np.ndarray]], tol: float,
                   order: int | None = None) -> CheckResult:
    links = tuple(
        Link(f"{lower_label}<={upper_label}", loewner_gap(lower, upper),
             tol * max(1.0, frobenius_norm(upper)))
        for (lower_label, lower), (upper_label, upper) in zip(chain, chain[1:])
    )
    return CheckResult(check_id, links, fp, order)


def _average(pencil: GeomeanPencil, weights: Iterable[float], scale: float) -> np.ndarray:
    return mean_combination(pencil.A, pencil.B, [(nu, scale) for nu in weights], pencil)


def check_props_41(A: HermitianPSD, B: HermitianPSD, tol: float = Tolerances.loewner,
                   variant: str = "polya", pencil: GeomeanPencil | None = None) -> CheckResult:
    """variant="polya" closes the chain with coefficient 1/3, "printed" with 1/2."""
    if variant not in PROPS41_COEFFICIENTS:
        raise ValueError(f"props_41 variant must be one of {tuple(PROPS41_COEFFICIENTS)}, got {variant!r}")
    c = PROPS41_COEFFICIENTS[variant]
    pencil = pencil or GeomeanPencil.of(A, B)
    lin = mean_combination(A, B, [(SpecialTerm.ARITH, 0.25), (2 / 3, 0.375), (1 / 3, 0.375)], pencil)
    polya = mean_combination(A, B, [(SpecialTerm.ARITH, c), (0.5, 2.0 * c)], pencil)
    return _loewner_chain("props_41", fingerprint(A.entries, B.entries), [
        ("log_mean", pencil.integral()), ("lin_upper", lin), ("polya_upper", polya),
    ], tol)


def check_props_42(A: HermitianPSD, B: HermitianPSD, m: int, tol: float = Tolerances.loewner,
                   pencil: GeomeanPencil | None = None) -> CheckResult:
    m = _require_order(m, 1)
    pencil = pencil or GeomeanPencil.of(A, B)
    return _loewner_chain("props_42", fingerprint(A.entries, B.entries), [
        ("geo_mean", pencil.at(0.5)),
        ("mid_sum", _average(pencil, (k / (m + 1) for k in range(1, m + 1)), 1.0 / m)),
        ("lower_sum", _average(pencil, ((2 * k - 1) / (2 * m) for k in range(1, m + 1)), 1.0 / m)),
        ("log_mean", pencil.integral()),
    ], tol, m)


def check_props_43(A: HermitianPSD, B: HermitianPSD, m: int, tol: float = Tolerances.loewner,
                   pencil: GeomeanPencil | None = None) -> CheckResult:
    m = _require_order(m, 2)
    pencil = pencil or GeomeanPencil.of(A, B)
    beta_terms = [(k / m, 1.0 / m) for k in range(m + 1)] + [(SpecialTerm.ARITH, -1.0 / m)]
    return _loewner_chain("props_43", fingerprint(A.entries, B.entries), [
        ("log_mean", pencil.integral()),
        ("beta_form", mean_combination(A, B, beta_terms, pencil)),
        ("upper_sum", _average(pencil, (k / (m - 1) for k in range(m)), 1.0 / m)),
        ("arith_mean", mean_combination(A, B, [(SpecialTerm.ARITH, 1.0)], pencil)),
    ], tol, m)


def check_props_44(A: HermitianPSD, B: HermitianPSD, tol: float = Tolerances.loewner,
                   pencil: GeomeanPencil | None = None) -> CheckResult:
    pencil = pencil or GeomeanPencil.of(A, B)
    rational = mean_combination(A, B, [(2 / 3, 1.0), (1 / 3, -1.0), (SpecialTerm.INVERSE, 1.0)], pencil)
    return _loewner_chain("props_44", fingerprint(A.entries, B.entries), [
        ("geo_mean", pencil.at(0.5)), ("rational_lower", rational), ("log_mean", pencil.integral()),
    ], tol)


GEOMEAN_PROPS = ("props_41", "props_42", "props_43", "props_44")


def check_geomean_props(A: HermitianPSD, B: HermitianPSD, m: int | None, prop: str,
                        tol: float = Tolerances.loewner, variant: str = "polya",
                        pencil: GeomeanPencil | None = None) -> CheckResult:
    pencil = pencil or GeomeanPencil.of(A, B)
    if prop == "props_41":
        return check_props_41(A, B, tol, variant, pencil)
    if prop == "props_42":
        return check_props_42(A, B, m, tol, pencil)
    if prop == "props_43":
        return check_props_43(A, B, m, tol, pencil)
    if prop == "props_44":
        return check_props_44(A, B, tol, pencil)
    raise UnknownCheckError(prop)


# ---------------------------------------------------------------------------
# Sum families against each other

def check_appendix_props(t: float, m: int, tol: float = Tolerances.scalar) -> CheckResult:
    m = _require_order(m, 1)
    a, a_next = alpha_m(t, m), alpha_m(t, m + 1)
    b, b_next = beta_m(t, m), beta_m(t, m + 1)
    g, d = gamma_m(t, m), delta_m(t, m)
    tolerance = tol * max(1.0, t)
    links = [
        Link("alpha_m<=alpha_m+1", a_next - a, tolerance),
        Link("beta_m+1<=beta_m", b - b_next, tolerance),
        Link("alpha_m<=beta_m", b - a, tolerance),
    ]
    if t <= 1.0:
        links += [Link("gamma_m<=alpha_m", a - g, tolerance), Link("beta_m<=delta_m", d - b, tolerance)]
    if t >= 1.0:
        links += [Link("delta_m<=alpha_m", a - d, tolerance), Link("beta_m<=gamma_m", g - b, tolerance)]
    return CheckResult("appendix_props", tuple(links), fingerprint(np.array([t]), m), m)


def riemann_gap_identities(t: float, m: int) -> dict[str, float]:
    """Closed forms of beta-delta, beta-gamma, alpha-gamma, alpha-delta."""
    if t == 1.0:
        return dict.fromkeys(("beta-delta", "beta-gamma", "alpha-gamma", "alpha-delta"), 0.0)
    root = math.expm1(math.log(t) / m)
    return {
        "beta-delta": (t - 1.0) / (2 * m),
        "beta-gamma": (1.0 - t) / (2 * m),
        "alpha-gamma": (t - 1.0) * (t ** (1.0 / (2 * m)) - t ** (1.0 / m)) / (m * root),
        "alpha-delta": (t - 1.0) / (m * (t ** (1.0 / (2 * m)) + 1.0)),
    }


def check_appendix_identities(t: float, m: int, tol: float = Tolerances.scalar) -> CheckResult:
    """Equality links: margin = -|direct difference - closed form|."""
    m = _require_order(m, 1)
    a, b, g, d = alpha_m(t, m), beta_m(t, m), gamma_m(t, m), delta_m(t, m)
    direct = {"beta-delta": b - d, "beta-gamma": b - g, "alpha-gamma": a - g, "alpha-delta": a - d}
    closed = riemann_gap_identities(t, m)
    tolerance = tol * max(1.0, t)
    links = tuple(Link(f"{key}==identity", -abs(direct[key] - closed[key]), tolerance) for key in direct)
    return CheckResult("appendix_identities", links, fingerprint(np.array([t]), m), m)


# ---------------------------------------------------------------------------
# Catalog

@dataclass(frozen=True)
class SuiteOptions:
    tolerances: Tolerances = field(default_factory=Tolerances)
    lower_orders: tuple[int, ...] = LOWER_ORDERS
    upper_orders: tuple[int, ...] = UPPER_ORDERS
    upper_variant: str = "ax_plus_xb"
    props41_variant: str = "polya"
    pd_eig_range: tuple[float, float] = DEFAULT_PD_EIG_RANGE
    workers: int = 1

    def __post_init__(self):
        if self.upper_variant not in UPPER_VARIANTS:
            raise ValueError(f"upper_variant must be one of {UPPER_VARIANTS}, got {self.upper_variant!r}")
        if self.props41_variant not in PROPS41_COEFFICIENTS:
            raise ValueError(f"props41_variant must be one of {tuple(PROPS41_COEFFICIENTS)}")
        if not self.lower_orders or min(self.lower_orders) < 1:
            raise ValueError(f"lower orders must be >= 1, got {self.lower_orders}")
        if not self.upper_orders or min(self.upper_orders) < 2:
            raise ValueError(f"upper orders must be >= 2, got {self.upper_orders}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")


class TrialContext:
    """Lazily drawn instances of one trial; each kind has its own seed stream."""

    def __init__(self, seed: int, spec: InstanceSpec, options: SuiteOptions):
        self.seed = seed
        self.spec = spec
        self.options = options

    def _rng(self, stream: int) -> np.random.Generator:
        return np.random.default_rng(derive_seed(self.seed, stream))

    @cached_property
    def pair(self) -> PositivePair:
        lo, hi = self.spec.eig_range
        a, b = np.exp(self._rng(1).uniform(math.log(lo), math.log(hi), 2))
        return PositivePair(float(a), float(b))

    @cached_property
    def lemma_sample(self) -> tuple[float, int, int, int, int]:
        rng = self._rng(2)
        x = float(np.exp(rng.uniform(math.log(LEMMA_X_RANGE[0]), math.log(LEMMA_X_RANGE[1]))))
        u, w = sorted(int(k) for k in rng.integers(0, 13, 2))
        v = int(rng.integers(0, 13))
        m = int(rng.integers(1, 11))
        return x, u, v, w, m

    @cached_property
    def triple(self) -> MeanTriple:
        return gen_instance(replace(self.spec, seed=derive_seed(self.seed, 3)))

    @cached_property
    def pencil(self) -> GeomeanPencil:
        spec = replace(self.spec, seed=derive_seed(self.seed, 4), eig_range=self.options.pd_eig_range,
                       require_pd=True)
        tr = gen_instance(spec)
        return GeomeanPencil.of(tr.A, tr.B)

    @cached_property
    def appendix_sample(self) -> tuple[float, int]:
        rng = self._rng(5)
        t = float(np.exp(rng.uniform(math.log(1e-3), math.log(1e3))))
        return t, int(rng.integers(1, APPENDIX_MAX_ORDER + 1))


Runner = Callable[[TrialContext, int | None], CheckResult]


@dataclass(frozen=True)
class CheckDefinition:
    check_id: str
    family: str
    statement: str
    runner: Runner = field(repr=False, compare=False)
    orders: str | None = None

    @property
    def statement_hash(self) -> str:
        return hashlib.sha256(self.statement.encode("utf-8")).hexdigest()[:12]


def _tol(ctx: TrialContext):
    return ctx.options.tolerances


def _loewner(prop: str) -> Runner:
    def run(ctx: TrialContext, m: int | None) -> CheckResult:
        return check_geomean_props(ctx.pencil.A, ctx.pencil.B, m, prop, _tol(ctx).loewner,
                                   ctx.options.props41_variant, ctx.pencil)
    return run


def _lemma(ctx: TrialContext, check_id: str) -> CheckResult:
    x, u, v, w, m = ctx.lemma_sample
    if check_id == "lemma2":
        return check_lemma2(x, u, v, w)
    if check_id == "lemma3":
        return check_lemma3(x, m)
    if check_id == "lemma5":
        return check_lemma5(x, max(m, 2))
    return check_induction(x, max(m, 2))


_DEFINITIONS = [
    CheckDefinition("lemma1", "scalar",
                    "L(a,b) <= ((a^(1/3)+b^(1/3))/2)^3 <= (2/3)sqrt(ab) + (1/3)(a+b)/2",
                    lambda ctx, m: check_scalar_chain_lemma1(ctx.pair, _tol(ctx).scalar)),
    CheckDefinition("lin_chain", "scalar",
                    "sqrt(ab) <= L(a,b) <= ((a^(1/3)+b^(1/3))/2)^3",
                    lambda ctx, m: check_lin_chain(ctx.pair, _tol(ctx).scalar)),
    CheckDefinition("lower_sum_chain", "scalar",
                    "sqrt(ab) <= (1/m)sum_{k=1}^m a^(k/(m+1)) b^((m+1-k)/(m+1)) "
                    "<= (1/m)sum_{k=1}^m a^((2k-1)/(2m)) b^((2m-2k+1)/(2m)) <= L(a,b), m >= 1",
                    lambda ctx, m: check_lower_sum_chain(ctx.pair, m, _tol(ctx).scalar), "lower"),
    CheckDefinition("upper_sum_chain", "scalar",
                    "L(a,b) <= (1/m)(sum_{k=0}^m a^(k/m) b^((m-k)/m) - (a+b)/2) "
                    "<= (1/m)sum_{k=0}^{m-1} a^(k/(m-1)) b^((m-1-k)/(m-1)) <= (a+b)/2, m >= 2",
                    lambda ctx, m: check_upper_sum_chain(ctx.pair, m, _tol(ctx).scalar), "upper"),
    CheckDefinition("rational_lower", "scalar",
                    "sqrt(ab) <= b(t+t^(1/3))/(1+t^(1/3)) <= L(a,b), t = a/b",
                    lambda ctx, m: check_rational_lower_chain(ctx.pair, _tol(ctx).scalar)),
    CheckDefinition("lemma2", "lemma",
                    "x^u(1-x^v) + x^w(x^v-1) >= 0 for x > 0 and integers w >= u >= 0, v >= 0",
                    lambda ctx, m: _lemma(ctx, "lemma2")),
    CheckDefinition("lemma3", "lemma",
                    "sum_{k=1}^m x^((2k-1)(m+1)) >= sum_{k=1}^m x^(2km) for x > 0, m >= 1",
                    lambda ctx, m: _lemma(ctx, "lemma3")),
    CheckDefinition("lemma5", "lemma",
                    "sum_{k=1}^{m-1} (x^(km) - x^(k(m-1))) >= (x^(m(m-1)) - 1)/2 for x > 0, m >= 2",
                    lambda ctx, m: _lemma(ctx, "lemma5")),
    CheckDefinition("induction", "lemma",
                    "sum_{k=0}^{m-1} t^k <= m(t^(m-1) + 1)/2 for t > 0, m >= 2",
                    lambda ctx, m: _lemma(ctx, "induction")),
    CheckDefinition("zou", "frobenius",
                    "||int A^v X B^(1-v) dv||_F <= (1/3)||2A^(1/2)XB^(1/2) + (AX+XB)/2||_F",
                    lambda ctx, m: check_frobenius_zou(ctx.triple, _tol(ctx).matrix)),
    CheckDefinition("refined_upper", "frobenius",
                    "||int A^v X B^(1-v) dv||_F <= ||(AX + 3A^(1/3)XB^(2/3) + 3A^(2/3)XB^(1/3) + XB)/8||_F "
                    "<= (1/3)||2A^(1/2)XB^(1/2) + (AX+XB)/2||_F",
                    lambda ctx, m: check_frobenius_refined_upper(ctx.triple, _tol(ctx).matrix)),
    CheckDefinition("lower_chain", "frobenius",
                    "||int A^v X B^(1-v) dv||_F >= (1/m)||sum_{k=1}^m A^((2k-1)/(2m)) X B^((2m-2k+1)/(2m))||_F "
                    ">= (1/m)||sum_{k=1}^m A^(k/(m+1)) X B^((m+1-k)/(m+1))||_F >= ||A^(1/2)XB^(1/2)||_F, m >= 1",
                    lambda ctx, m: check_frobenius_lower_chain(ctx.triple, m, _tol(ctx).matrix), "lower"),
    CheckDefinition("upper_chain", "frobenius",
                    "||int A^v X B^(1-v) dv||_F <= (1/m)||sum_{k=0}^m A^(k/m) X B^((m-k)/m) - (AX+XB)/2||_F "
                    "<= (1/m)||sum_{k=0}^{m-1} A^(k/(m-1)) X B^((m-1-k)/(m-1))||_F <= (1/2)||AX+XB||_F, m >= 2",
                    lambda ctx, m: check_frobenius_upper_chain(ctx.triple, m, _tol(ctx).matrix,
                                                               ctx.options.upper_variant), "upper"),
    CheckDefinition("hk_chains", "frobenius",
                    "||int A^v X B^(1-v) dv||_F >= (1/m)||sum_{k=1}^m A^(k/(m+1)) X B^((m+1-k)/(m+1))||_F "
                    ">= ||A^(1/2)XB^(1/2)||_F and ||int A^v X B^(1-v) dv||_F "
                    "<= (1/m)||sum_{k=0}^{m-1} A^(k/(m-1)) X B^((m-1-k)/(m-1))||_F <= (1/2)||AX+XB||_F",
                    lambda ctx, m: check_hk_chains(ctx.triple, m, _tol(ctx).matrix), "lower"),
    CheckDefinition("props_41", "loewner",
                    "int A#_v B dv <= (1/4){(A+B)/2 + (3/2)(A#_(2/3)B + A#_(1/3)B)} <= c{(A+B)/2 + 2A#_(1/2)B}",
                    _loewner("props_41")),
    CheckDefinition("props_42", "loewner",
                    "int A#_v B dv >= (1/m)sum_{k=1}^m A#_((2k-1)/(2m))B >= (1/m)sum_{k=1}^m A#_(k/(m+1))B "
                    ">= A#_(1/2)B, m >= 1",
                    _loewner("props_42"), "lower"),
    CheckDefinition("props_43", "loewner",
                    "int A#_v B dv <= (1/m)(sum_{k=0}^m A#_(k/m)B - (A+B)/2) "
                    "<= (1/m)sum_{k=0}^{m-1} A#_(k/(m-1))B <= (A+B)/2, m >= 2",
                    _loewner("props_43"), "upper"),
    CheckDefinition("props_44", "loewner",
                    "int A#_v B dv >= A#_(2/3)B - A#_(1/3)B + 2{(A#_(1/3)B)^(-1) + A^(-1)}^(-1) >= A#_(1/2)B",
                    _loewner("props_44")),
    CheckDefinition("appendix_props", "appendix",
                    "alpha_m <= alpha_(m+1); beta_(m+1) <= beta_m; alpha_m <= beta_m; "
                    "t < 1: gamma_m < alpha_m, beta_m < delta_m; t > 1: delta_m < alpha_m, beta_m < gamma_m",
                    lambda ctx, m: check_appendix_props(*ctx.appendix_sample, _tol(ctx).scalar)),
    CheckDefinition("appendix_identities", "appendix",
                    "beta_m - delta_m = (t-1)/(2m); beta_m - gamma_m = (1-t)/(2m); "
                    "alpha_m - gamma_m = (t-1)(t^(1/(2m)) - t^(1/m))/(m(t^(1/m)-1)); "
                    "alpha_m - delta_m = (t-1)/(m(t^(1/(2m))+1))",
                    lambda ctx, m: check_appendix_identities(*ctx.appendix_sample, _tol(ctx).scalar)),
]

CHECKS: dict[str, CheckDefinition] = {d.check_id: d for d in _DEFINITIONS}


def check_ids(family: str | None = None) -> list[str]:
    return [d.check_id for d in _DEFINITIONS if family is None or d.family == family]


def resolve_checks(ids: Iterable[str] | None) -> list[CheckDefinition]:
    """Definitions for the given ids in catalog order; None or empty selects all."""
    if not ids:
        return list(_DEFINITIONS)
    wanted = list(dict.fromkeys(i.strip() for i in ids if i.strip()))
    unknown = [i for i in wanted if i not in CHECKS]
    if unknown:
        raise UnknownCheckError(f"unknown check id(s): {', '.join(unknown)}; known: {', '.join(CHECKS)}")
    return [d for d in _DEFINITIONS if d.check_id in wanted]


# ---------------------------------------------------------------------------
# Aggregation

@dataclass
class LinkSummary:
    evaluations: int = 0
    failures: int = 0
    skipped: int = 0
    worst_margin: float | None = None
    worst_ratio: float | None = None

    def add(self, link: Link) -> None:
        if link.skipped:
            self.skipped += 1
            return
        self.evaluations += 1
        if not link.passed:
            self.failures += 1
        ratio = link.margin / link.tolerance if link.tolerance > 0 else link.margin
        self.worst_margin = link.margin if self.worst_margin is None else min(self.worst_margin, link.margin)
        self.worst_ratio = ratio if self.worst_ratio is None else min(self.worst_ratio, ratio)


@dataclass
class CheckSummary:
    check_id: str
    runs: int = 0
    failed: int = 0
    skipped: int = 0
    links: dict[str, LinkSummary] = field(default_factory=dict)
    failing_fingerprints: set[str] = field(default_factory=set)

    def add(self, result: CheckResult) -> None:
        self.runs += 1
        if result.skipped:
            self.skipped += 1
        if not result.passed:
            self.failed += 1
            self.failing_fingerprints.add(result.instance_fingerprint)
        for link in result.links:
            self.links.setdefault(link.label, LinkSummary()).add(link)


@dataclass
class Report:
    meta: dict
    checks: dict[str, CheckSummary]

    @classmethod
    def from_results(cls, results: Iterable[CheckResult], meta: dict,
                     order: Sequence[str] | None = None) -> "Report":
        summaries: dict[str, CheckSummary] = {}
        for result in results:
            summaries.setdefault(result.check_id, CheckSummary(result.check_id)).add(result)
        ids = list(order) if order else sorted(summaries)
        checks = {i: summaries.get(i, CheckSummary(i)) for i in ids}
        for summary in checks.values():
            summary.links = dict(sorted(summary.links.items()))
        return cls(meta=meta, checks=checks)

    @property
    def failures(self) -> int:
        return sum(s.failed for s in self.checks.values())

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def rows(self) -> list[dict]:
        rows = []
        for check_id, summary in self.checks.items():
            for label, link in summary.links.items():
                rows.append({
                    "check_id": check_id, "link": label, "evaluations": link.evaluations,
                    "failures": link.failures, "skipped": link.skipped,
                    "worst_margin": link.worst_margin, "worst_ratio": link.worst_ratio,
                })
        return rows

    def full_meta(self) -> dict:
        meta = dict(self.meta)
        meta["summary"] = {
            check_id: {
                "runs": s.runs, "failed": s.failed, "skipped": s.skipped,
                "statement_hash": CHECKS[check_id].statement_hash if check_id in CHECKS else None,
                "failing_fingerprints": sorted(s.failing_fingerprints),
            }
            for check_id, s in self.checks.items()
        }
        return meta


def _meta(spec: InstanceSpec, trials: int, definitions: Sequence[CheckDefinition],
          options: SuiteOptions) -> dict:
    options_meta = asdict(options)
    options_meta.pop("workers")
    return {
        "version": VERSION,
        "seed": spec.seed,
        "trials": trials,
        "checks": [d.check_id for d in definitions],
        "spec": {k: v for k, v in asdict(spec).items() if k != "seed"},
        "options": options_meta,
    }


def _orders(definition: CheckDefinition, options: SuiteOptions) -> Sequence[int | None]:
    if definition.orders == "lower":
        return options.lower_orders
    if definition.orders == "upper":
        return options.upper_orders
    return (None,)


def _run_trial(index: int, spec: InstanceSpec, definitions: Sequence[CheckDefinition],
               options: SuiteOptions) -> tuple[list[CheckResult], bool | None]:
    ctx = TrialContext(derive_seed(spec.seed, index), spec, options)
    results = []
    for definition in definitions:
        for m in _orders(definition, options):
            result = definition.runner(ctx, m)
            if not result.passed:
                logger.warning("Check %s (m=%s) failed on instance %s of trial %d",
                               result.check_id, m, result.instance_fingerprint, index)
            results.append(result)
    monotone = None
    if any(d.check_id == "lower_chain" for d in definitions):
        profile = lower_chain_profile(ctx.triple, sorted(options.lower_orders))
        monotone = all(b >= a for a, b in zip(profile, profile[1:]))
    logger.debug("Trial %d: %d results", index, len(results))
    return results, monotone


def run_suite(spec: InstanceSpec, trials: int, checks: Iterable[str] | None = None,
              options: SuiteOptions | None = None) -> Report:
    """
    Run the selected checks on `trials` independently seeded instances.

    Trial i draws every instance from derive_seed(spec.seed, i); the report
    does not depend on options.workers.
    """
    if isinstance(trials, bool) or not isinstance(trials, (int, np.integer)) or trials < 1:
        raise ValueError(f"trials must be an integer >= 1, got {trials!r}")
    options = options or SuiteOptions()
    definitions = resolve_checks(checks)
    logger.info("Running %d trials of %s (seed %d, workers %d)",
                trials, ",".join(d.check_id for d in definitions), spec.seed, options.workers)

    def run(i):
        return _run_trial(i, spec, definitions, options)

    if options.workers > 1:
        with ThreadPoolExecutor(max_workers=options.workers) as pool:
            outcomes = list(pool.map(run, range(trials)))
    else:
        outcomes = [run(i) for i in range(trials)]

    meta = _meta(spec, trials, definitions, options)
    flags = [flag for _, flag in outcomes if flag is not None]
    if flags:
        meta["observations"] = {"lower_chain_middle_monotone": {"trials": len(flags), "monotone": sum(flags)}}

    report = Report.from_results((r for results, _ in outcomes for r in results), meta,
                                 [d.check_id for d in definitions])
    logger.info("Suite finished: %d failing check runs", report.failures)
    return report


def run_lemma_grid(points: int = 41, max_exponent: int = 12, max_order: int = 10,
                   x_range: tuple[float, float] = LEMMA_X_RANGE, tol: float = LEMMA_TOLERANCE) -> Report:
    """Exhaustive sweep of the integer-exponent lemmas over a log grid of x."""
    results = []
    for x in log_grid(x_range[0], x_range[1], points):
        for u in range(max_exponent + 1):
            for w in range(u, max_exponent + 1):
                for v in range(max_exponent + 1):
                    results.append(check_lemma2(x, u, v, w, tol))
        for m in range(1, max_order + 1):
            results.append(check_lemma3(x, m, tol))
            if m >= 2:
                results.append(check_lemma5(x, m, tol))
                results.append(check_induction(x, m, tol))
    meta = {"version": VERSION, "grid": {"points": points, "max_exponent": max_exponent,
                                         "max_order": max_order, "x_range": list(x_range)}}
    report = Report.from_results(results, meta, ["lemma2", "lemma3", "lemma5", "induction"])
    skipped = sum(s.skipped for s in report.checks.values())
    if skipped:
        logger.warning("Lemma grid: %d samples skipped after overflow", skipped)
    return report
