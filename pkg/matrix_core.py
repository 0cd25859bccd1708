"""
Hermitian positive semidefinite matrices and the matrix means built on them.

Every map here works in the eigenbases of its arguments: a two-sided map
X -> sum_k c_k A^{p_k} X B^{1-p_k} becomes a Hadamard multiplier on
Y = U* X V, and a weighted geometric mean becomes a function of the
congruence T = A^{-1/2} B A^{-1/2}.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np
import scipy.linalg
from numpy.typing import NDArray

from scalar_means import log_mean_array

logger = logging.getLogger(__name__)

ComplexMatrix = NDArray[np.complex128]

HERMITIAN_RTOL = 1e-8
PSD_RTOL = 1e-10
PD_RTOL = 1e-10


class SingularMatrixError(ValueError):
    """An inverse or congruence was requested on a matrix that is not positive definite."""


class DimensionMismatchError(ValueError):
    """Operands of a matrix map do not share a dimension."""


def as_matrix(entries, dim: int | None = None) -> ComplexMatrix:
    """Validate a square finite matrix and return it as a complex array."""
    M = np.asarray(entries, dtype=np.complex128)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {M.shape}")
    if dim is not None and M.shape[0] != dim:
        raise DimensionMismatchError(f"expected dimension {dim}, got {M.shape[0]}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix entries must be finite")
    return M


def hermitian_part(M) -> ComplexMatrix:
    M = np.asarray(M, dtype=np.complex128)
    return (M + M.conj().T) / 2.0


class HermitianPSD:
    """
    Immutable Hermitian positive semidefinite matrix with its eigendecomposition.

    The input is symmetrized, eigenvalues are sorted in descending order and
    small negative eigenvalues (above -PSD_RTOL * lambda_max) are clamped to 0.
    """

    __slots__ = ("_entries", "_eigenvalues", "_eigenvectors")

    def __init__(self, entries):
        M = as_matrix(entries)
        scale = np.linalg.norm(M)
        asymmetry = np.linalg.norm(M - M.conj().T)
        if asymmetry > HERMITIAN_RTOL * max(scale, np.finfo(float).tiny):
            raise ValueError(f"matrix is not Hermitian (asymmetry {asymmetry:.3e}, norm {scale:.3e})")
        H = hermitian_part(M)
        values, vectors = scipy.linalg.eigh(H)
        values, vectors = values[::-1], vectors[:, ::-1]
        lam_max = max(values[0], 0.0)
        if values[-1] < -PSD_RTOL * lam_max or (lam_max == 0.0 and values[-1] < 0.0):
            raise ValueError(f"matrix is not positive semidefinite (lambda_min {values[-1]:.3e})")
        self._freeze(H, np.clip(values, 0.0, None), vectors)

    def _freeze(self, entries, eigenvalues, eigenvectors):
        for arr in (entries, eigenvalues, eigenvectors):
            arr.setflags(write=False)
        object.__setattr__(self, "_entries", entries)
        object.__setattr__(self, "_eigenvalues", eigenvalues)
        object.__setattr__(self, "_eigenvectors", eigenvectors)

    def __setattr__(self, name, value):
        raise AttributeError("HermitianPSD is immutable")

    @classmethod
    def from_eig(cls, eigenvalues, eigenvectors) -> "HermitianPSD":
        """Build from a known eigendecomposition (eigenvalues >= 0) without refactorizing."""
        values = np.clip(np.asarray(eigenvalues, dtype=float), 0.0, None)
        vectors = np.array(eigenvectors, dtype=np.complex128)
        order = np.argsort(-values, kind="stable")
        values, vectors = values[order].copy(), vectors[:, order].copy()
        entries = hermitian_part((vectors * values) @ vectors.conj().T)
        obj = cls.__new__(cls)
        obj._freeze(entries, values, vectors)
        return obj

    @classmethod
    def project(cls, entries) -> "HermitianPSD":
        """For results PSD by construction: symmetrize and clamp every negative eigenvalue."""
        H = hermitian_part(as_matrix(entries))
        values, vectors = scipy.linalg.eigh(H)
        obj = cls.__new__(cls)
        obj._freeze(H, np.clip(values[::-1], 0.0, None), vectors[:, ::-1].copy())
        return obj

    @classmethod
    def identity(cls, dim: int) -> "HermitianPSD":
        return cls.from_eig(np.ones(dim), np.eye(dim))

    @classmethod
    def diagonal(cls, values) -> "HermitianPSD":
        values = np.asarray(values, dtype=float)
        if np.any(values < 0):
            raise ValueError("diagonal entries must be nonnegative")
        return cls.from_eig(values, np.eye(len(values)))

    @property
    def entries(self) -> ComplexMatrix:
        return self._entries

    @property
    def eigenvalues(self) -> NDArray[np.float64]:
        return self._eigenvalues

    @property
    def eigenvectors(self) -> ComplexMatrix:
        return self._eigenvectors

    @property
    def dim(self) -> int:
        return self._entries.shape[0]

    @property
    def lambda_max(self) -> float:
        return float(self._eigenvalues[0])

    @property
    def lambda_min(self) -> float:
        return float(self._eigenvalues[-1])

    @property
    def pd_eps(self) -> float:
        """Threshold below which the matrix counts as singular."""
        return PD_RTOL * self.lambda_max

    def is_pd(self) -> bool:
        return self.lambda_max > 0.0 and self.lambda_min >= self.pd_eps

    def require_pd(self, what: str = "matrix") -> None:
        if not self.is_pd():
            raise SingularMatrixError(
                f"{what} must be positive definite (lambda_min {self.lambda_min:.3e} < pd_eps {self.pd_eps:.3e})"
            )

    def __repr__(self) -> str:
        return f"HermitianPSD(dim={self.dim}, lambda=[{self.lambda_min:.3e}, {self.lambda_max:.3e}])"


def _entries(M) -> ComplexMatrix:
    return M.entries if isinstance(M, HermitianPSD) else as_matrix(M)


def _same_dim(*dims: int) -> None:
    if len(set(dims)) != 1:
        raise DimensionMismatchError(f"dimension mismatch: {dims}")


def frobenius_norm(M) -> float:
    """(sum |m_ij|^2)^{1/2}."""
    return float(np.linalg.norm(_entries(M)))


def frac_power(A: HermitianPSD, p: float) -> HermitianPSD:
    """
    A^p = U diag(lambda^p) U*, with 0^p = 0 for p > 0 and A^0 = I.

    Negative powers require A to be positive definite.
    """
    if p == 0:
        return HermitianPSD.identity(A.dim)
    if p < 0:
        A.require_pd("base of a negative power")
    positive = A.eigenvalues > 0
    values = np.zeros_like(A.eigenvalues)
    values[positive] = np.power(A.eigenvalues[positive], p)
    return HermitianPSD.from_eig(values, A.eigenvectors)


def _two_sided(A: HermitianPSD, B: HermitianPSD, X, multiplier: NDArray) -> ComplexMatrix:
    X = as_matrix(X)
    _same_dim(A.dim, B.dim, X.shape[0])
    U, V = A.eigenvectors, B.eigenvectors
    Y = U.conj().T @ X @ V
    return U @ (multiplier * Y) @ V.conj().T


def log_mean_multiplier(A: HermitianPSD, B: HermitianPSD) -> NDArray[np.float64]:
    """Lambda_ij = L(alpha_i, beta_j) over the eigenvalues of A and B."""
    return log_mean_array(A.eigenvalues[:, None], B.eigenvalues[None, :])


def log_mean_map(A: HermitianPSD, B: HermitianPSD, X) -> ComplexMatrix:
    """int_0^1 A^nu X B^{1-nu} dnu, evaluated as U (Lambda o Y) V*."""
    return _two_sided(A, B, X, log_mean_multiplier(A, B))


def power_sum_multiplier(A: HermitianPSD, B: HermitianPSD, exponents: Sequence[float],
                         weight: float = 1.0, coefficients: Sequence[float] | None = None) -> NDArray[np.float64]:
    exponents = np.asarray(exponents, dtype=float)
    if exponents.ndim != 1 or exponents.size == 0:
        raise ValueError("exponents must be a nonempty list")
    if np.any((exponents < 0) | (exponents > 1)):
        raise ValueError(f"exponents must lie in [0, 1], got {exponents.tolist()}")
    if coefficients is None:
        coefficients = np.ones_like(exponents)
    else:
        coefficients = np.asarray(coefficients, dtype=float)
        if coefficients.shape != exponents.shape:
            raise ValueError("coefficients must match exponents one to one")
    alpha, beta = A.eigenvalues, B.eigenvalues
    total = np.zeros((alpha.size, beta.size))
    for p, c in zip(exponents, coefficients):
        total += c * np.outer(np.power(alpha, p), np.power(beta, 1.0 - p))
    return weight * total


def power_sum_map(A: HermitianPSD, B: HermitianPSD, X, exponents: Sequence[float],
                  weight: float = 1.0, coefficients: Sequence[float] | None = None) -> ComplexMatrix:
    """
    weight * sum_k c_k A^{p_k} X B^{1-p_k} as a single Hadamard multiplier.

    coefficients default to 1 for every exponent.
    """
    multiplier = power_sum_multiplier(A, B, exponents, weight, coefficients)
    return _two_sided(A, B, X, multiplier)


# ---------------------------------------------------------------------------
# Geometric means

class SpecialTerm(str, Enum):
    ARITH = "arith"
    INVERSE = "inverse"


@dataclass(frozen=True, eq=False)
class GeomeanPencil:
    """
    The pair (A, B) prepared for weighted geometric means.

    Holds A^{1/2} and the eigendecomposition of T = A^{-1/2} B A^{-1/2};
    A#_nu B = A^{1/2} T^nu A^{1/2}.
    """
    A: HermitianPSD
    B: HermitianPSD
    a_half: ComplexMatrix = field(repr=False)
    T: HermitianPSD = field(repr=False)

    @classmethod
    def of(cls, A: HermitianPSD, B: HermitianPSD) -> "GeomeanPencil":
        _same_dim(A.dim, B.dim)
        A.require_pd("A in A #_nu B")
        a_half = frac_power(A, 0.5).entries
        a_inv_half = frac_power(A, -0.5).entries
        T = HermitianPSD.project(a_inv_half @ B.entries @ a_inv_half)
        return cls(A=A, B=B, a_half=a_half, T=T)

    def apply(self, values: NDArray[np.float64]) -> ComplexMatrix:
        """A^{1/2} U diag(values) U* A^{1/2} for values indexed like T's eigenvalues."""
        U = self.T.eigenvectors
        inner = (U * values) @ U.conj().T
        return hermitian_part(self.a_half @ inner @ self.a_half)

    def at(self, nu: float) -> ComplexMatrix:
        if not 0.0 <= nu <= 1.0:
            raise ValueError(f"weight nu must lie in [0, 1], got {nu}")
        if nu == 0.0:
            return self.A.entries.copy()
        lam = self.T.eigenvalues
        return self.apply(np.power(lam, nu))

    def integral(self) -> ComplexMatrix:
        """int_0^1 A#_nu B dnu = A^{1/2} L(T, I) A^{1/2}, with L(0, 1) = 0."""
        return self.apply(log_mean_array(self.T.eigenvalues, 1.0))


def weighted_geomean(A: HermitianPSD, B: HermitianPSD, nu: float) -> HermitianPSD:
    """A#_nu B = A^{1/2} (A^{-1/2} B A^{-1/2})^nu A^{1/2}; nu weights B."""
    pencil = GeomeanPencil.of(A, B)
    if nu == 1.0:
        return B
    return HermitianPSD.project(pencil.at(nu))


def integral_geomean(A: HermitianPSD, B: HermitianPSD) -> HermitianPSD:
    return HermitianPSD.project(GeomeanPencil.of(A, B).integral())


Term = tuple[float | SpecialTerm | str, float]


def mean_combination(A: HermitianPSD, B: HermitianPSD, terms: Sequence[Term],
                     pencil: GeomeanPencil | None = None) -> ComplexMatrix:
    """
    Linear combination of (A + B)/2, A#_nu B terms and 2{(A#_{1/3}B)^{-1} + A^{-1}}^{-1}.

    Each term is (nu or SpecialTerm, coefficient). Returns a Hermitian array.
    The terms [(SpecialTerm.ARITH, 0.25), (2/3, 0.375), (1/3, 0.375)] give the
    matrix version of ((a^{1/3} + b^{1/3}) / 2)^3.
    """
    pencil = pencil or GeomeanPencil.of(A, B)
    total = np.zeros((A.dim, A.dim), dtype=np.complex128)
    for tag, coefficient in terms:
        if isinstance(tag, str) and not isinstance(tag, SpecialTerm):
            tag = SpecialTerm(tag)
        if tag is SpecialTerm.ARITH:
            total += coefficient * (A.entries + B.entries) / 2.0
        elif tag is SpecialTerm.INVERSE:
            total += coefficient * _inverse_term(A, pencil)
        else:
            total += coefficient * pencil.at(float(tag))
    return hermitian_part(total)


def _inverse_term(A: HermitianPSD, pencil: GeomeanPencil) -> ComplexMatrix:
    M = HermitianPSD.project(pencil.at(1.0 / 3.0))
    M.require_pd("A #_{1/3} B")
    S = HermitianPSD.project(frac_power(M, -1.0).entries + frac_power(A, -1.0).entries)
    S.require_pd("(A #_{1/3} B)^{-1} + A^{-1}")
    return 2.0 * frac_power(S, -1.0).entries


def loewner_gap(M1, M2) -> float:
    """lambda_min(M2 - M1); M1 <= M2 in Loewner order iff this is (numerically) >= 0."""
    E1, E2 = _entries(M1), _entries(M2)
    _same_dim(E1.shape[0], E2.shape[0])
    return float(scipy.linalg.eigvalsh(hermitian_part(E2 - E1))[0])
