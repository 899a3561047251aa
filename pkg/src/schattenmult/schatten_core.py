"""Schatten p-class calculus for small dense complex matrices.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  Vectors of
``C^N`` are 1-d arrays.  The inner product is linear in the first argument::

    <x, y> = sum_k x[k] * conj(y[k])

so that the rank-one operator ``x (x) y`` acts as ``z -> <z, y> x``.

Flattening an ``N x N`` matrix uses row-major order, i.e. the entry
``A[n, m]`` sits at flat index ``n * N + m`` (zero-based).  Under this
convention ``tr_inner(T, S) == vdot(vec(S), vec(T))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DimensionError, DomainError

__all__ = [
    "INVERTIBLE_RTOL",
    "SV_ZERO_RTOL",
    "SchattenExponent",
    "SchattenOperator",
    "abs_op",
    "adjoint",
    "as_matrix",
    "as_vector",
    "c2_basis",
    "conjugate_exponent",
    "inner",
    "is_invertible",
    "op_norm_power",
    "rank_one",
    "schatten_norm",
    "singular_values",
    "trace",
    "tr_inner",
    "unvec",
    "vec",
]

#: singular values below ``SV_ZERO_RTOL * s_1`` are reported as exact zeros
SV_ZERO_RTOL = 1e-12
#: repo-wide invertibility gate: ``s_min > INVERTIBLE_RTOL * s_max``
INVERTIBLE_RTOL = 1e-8


def as_matrix(A, square: bool = False) -> np.ndarray:
    """Validate and convert ``A`` to a finite 2-d complex array."""
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim != 2:
        raise DimensionError(f"expected a 2-d matrix, got shape {A.shape}")
    if square and A.shape[0] != A.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {A.shape}")
    if A.size == 0:
        raise DimensionError("empty matrix")
    if not np.all(np.isfinite(A)):
        raise DomainError("matrix has non-finite entries")
    return A


def as_vector(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim != 1:
        raise DimensionError(f"expected a 1-d vector, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise DomainError("vector has non-finite entries")
    return x


def conjugate_exponent(p: float) -> float:
    """Return ``q`` with ``1/p + 1/q = 1`` (``1 <-> inf``)."""
    if p < 1:
        raise DomainError(f"exponent must be >= 1, got {p}")
    if p == 1:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


@dataclass(frozen=True)
class SchattenExponent:
    """A Hölder pair ``(p, q)`` with ``1 < p < inf``."""

    p: float

    def __post_init__(self):
        if not (1 < self.p < math.inf):
            raise DomainError(f"Schatten exponent must lie in (1, inf), got {self.p}")

    @property
    def q(self) -> float:
        return conjugate_exponent(self.p)


def singular_values(A) -> np.ndarray:
    """Singular values of a square matrix, nonincreasing.

    Values below ``SV_ZERO_RTOL * s_1`` are clamped to zero.
    """
    A = as_matrix(A, square=True)
    s = np.linalg.svd(A, compute_uv=False)
    if s[0] > 0:
        s[s < SV_ZERO_RTOL * s[0]] = 0.0
    return s


def _norm_from_sv(s: np.ndarray, p: float) -> float:
    if p < 1:
        raise DomainError(f"Schatten exponent must be >= 1, got {p}")
    if math.isinf(p):
        return float(s[0]) if s.size else 0.0
    if s.size == 0 or s[0] == 0:
        return 0.0
    # scale by s_1 to keep large p from overflowing
    return float(s[0] * np.sum((s / s[0]) ** p) ** (1.0 / p))


def schatten_norm(A, p: float) -> float:
    """``(sum_i s_i(A)^p)^(1/p)``; ``p = inf`` gives the operator norm."""
    if p < 1:
        raise DomainError(f"Schatten exponent must be >= 1, got {p}")
    return _norm_from_sv(singular_values(A), p)


class SchattenOperator:
    """A square matrix with lazily cached singular values."""

    def __init__(self, matrix):
        self.matrix = as_matrix(matrix, square=True)
        self.matrix.setflags(write=False)

    @property
    def N(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def singular_values(self) -> np.ndarray:
        s = singular_values(self.matrix)
        s.setflags(write=False)
        return s

    def norm(self, p: float) -> float:
        return _norm_from_sv(self.singular_values, p)

    @property
    def op_norm(self) -> float:
        return float(self.singular_values[0])

    def __repr__(self):
        return f"SchattenOperator(N={self.N})"


def is_invertible(A, rtol: float = INVERTIBLE_RTOL) -> bool:
    """Relative condition gate on a square matrix."""
    s = np.linalg.svd(as_matrix(A, square=True), compute_uv=False)
    return bool(s[0] > 0 and s[-1] > rtol * s[0])


def trace(A) -> complex:
    A = as_matrix(A, square=True)
    return complex(np.trace(A))


def inner(x, y) -> complex:
    """``<x, y>``, linear in ``x``."""
    x, y = as_vector(x), as_vector(y)
    if x.shape != y.shape:
        raise DimensionError(f"length mismatch {x.shape} vs {y.shape}")
    return complex(np.vdot(y, x))


def rank_one(x, y) -> np.ndarray:
    """Matrix of ``x (x) y : z -> <z, y> x``, entries ``x[n] * conj(y[m])``."""
    x, y = as_vector(x), as_vector(y)
    if x.shape != y.shape:
        raise DimensionError(f"length mismatch {x.shape} vs {y.shape}")
    return np.outer(x, y.conj())


def adjoint(A) -> np.ndarray:
    return as_matrix(A).conj().T


def abs_op(A) -> SchattenOperator:
    """``|A| = (A* A)^(1/2)`` built from the SVD ``A = W diag(s) V*``."""
    A = as_matrix(A, square=True)
    _, s, Vh = np.linalg.svd(A)
    if s[0] > 0:
        s[s < SV_ZERO_RTOL * s[0]] = 0.0
    V = Vh.conj().T
    root = (V * s) @ Vh
    return SchattenOperator(0.5 * (root + root.conj().T))


def tr_inner(T, S) -> complex:
    """Hilbert-Schmidt pairing ``tr(S* T)``."""
    T, S = as_matrix(T), as_matrix(S)
    if T.shape != S.shape:
        raise DimensionError(f"shape mismatch {T.shape} vs {S.shape}")
    return complex(np.vdot(S, T))


def vec(A) -> np.ndarray:
    """Row-major flattening; ``A[n, m]`` goes to index ``n * N + m``."""
    return np.asarray(A, dtype=np.complex128).reshape(-1)


def unvec(v, N: int) -> np.ndarray:
    v = np.asarray(v, dtype=np.complex128)
    if v.size != N * N:
        raise DimensionError(f"cannot reshape {v.size} entries into {N}x{N}")
    return v.reshape(N, N)


def c2_basis(N: int) -> list[np.ndarray]:
    """Matrix units ``E_k = e_n (x) e_m`` ordered by ``k = n * N + m``."""
    if N < 1:
        raise DomainError("N must be >= 1")
    eye = np.eye(N, dtype=np.complex128)
    return [rank_one(eye[n], eye[m]) for n in range(N) for m in range(N)]


def op_norm_power(A, iters: int = 5000, seed: int = 0, rtol: float = 1e-14) -> float:
    """Power-iteration estimate of ``||A||_op`` on ``A* A``.

    Independent of the SVD path; used as a cross-check.
    """
    A = as_matrix(A)
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(A.shape[1]) + 1j * rng.standard_normal(A.shape[1])
    x /= np.linalg.norm(x)
    AhA = A.conj().T @ A
    lam = 0.0
    for _ in range(iters):
        y = AhA @ x
        ny = np.linalg.norm(y)
        if ny == 0:
            return 0.0
        x = y / ny
        new = float(np.real(np.vdot(x, AhA @ x)))
        if abs(new - lam) <= rtol * max(new, 1e-300):
            lam = new
            break
        lam = new
    return math.sqrt(max(lam, 0.0))
