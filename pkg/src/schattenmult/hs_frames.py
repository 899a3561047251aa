"""Hilbert-Schmidt frames for ``K = C^d`` with respect to ``H = C^N``.

A system ``G = {G_i}_{i<n}`` is stored through its stacked analysis matrix
``U`` of shape ``(n * N**2, d)``: rows ``i*N**2 .. (i+1)*N**2 - 1`` hold the
vectorized action of ``G_i``, i.e. ``vec(G_i f) = U_i @ f``.  The synthesis
operator is ``T = U^H`` and the frame operator is ``S = U^H U``.

Frame bounds follow the squared convention
``A ||f||^2 <= sum_i ||G_i f||_2^2 <= B ||f||^2`` unless a name says
``unsquared``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import DimensionError, DomainError, InvalidSpecError, NotAFrameError
from .op_sequences import OpSequence
from .schatten_core import INVERTIBLE_RTOL, as_matrix, as_vector

__all__ = [
    "EQUALITY_TOL",
    "GeneralizedDualSpec",
    "HSFrameSystem",
    "RieszCheck",
    "analysis",
    "canonical_dual",
    "dual_family",
    "equivalence_operator",
    "equivalence_operator_normalized",
    "frame_bounds",
    "frame_bounds_unsquared",
    "generalized_dual",
    "is_dual",
    "is_generalized_dual",
    "is_riesz_basis",
    "kernel_basis",
    "kernel_bessel",
    "kernel_projection",
    "range_projection",
    "recover_generalized_dual_spec",
    "special_probe",
    "synthesis",
    "systems_equal",
]

#: systems with stacked analysis matrices closer than this are identical
EQUALITY_TOL = 1e-10


class HSFrameSystem:
    """A finite family of maps ``G_i : C^d -> C^{N x N}``.

    Caches (singular values of ``U``, frame operator, bounds, ``S^{-1}``)
    are computed in the constructor; instances are read-only afterwards.
    """

    def __init__(self, analysis_mat, n: int, N: int):
        U = as_matrix(analysis_mat)
        if U.shape[0] != n * N * N:
            raise DimensionError(
                f"analysis matrix has {U.shape[0]} rows, expected n*N^2 = {n * N * N}"
            )
        U = U.copy()
        U.setflags(write=False)
        self.analysis_mat = U
        self.n = int(n)
        self.N = int(N)
        self.d = U.shape[1]

        sv = np.linalg.svd(U, compute_uv=False)
        if sv.size < self.d:
            sv = np.concatenate([sv, np.zeros(self.d - sv.size)])
        sv.setflags(write=False)
        self.singular_values = sv
        S = U.conj().T @ U
        S = 0.5 * (S + S.conj().T)
        S.setflags(write=False)
        self.frame_op = S
        self.upper_sq = float(sv[0] ** 2)
        self.lower_sq = float(sv[-1] ** 2)
        self.is_frame = bool(sv[0] > 0 and sv[-1] > INVERTIBLE_RTOL * sv[0])

        self._S_inv = None
        self._S_inv_sqrt = None
        self._S_sqrt = None
        if self.is_frame:
            w, V = np.linalg.eigh(S)
            w = np.clip(w, self.lower_sq * 0.5, None)
            self._S_inv = _freeze((V / w) @ V.conj().T)
            self._S_inv_sqrt = _freeze((V / np.sqrt(w)) @ V.conj().T)
            self._S_sqrt = _freeze((V * np.sqrt(w)) @ V.conj().T)

    @classmethod
    def from_maps(cls, maps) -> "HSFrameSystem":
        """Build from a sequence of ``N**2 x d`` matrices."""
        maps = np.asarray(maps, dtype=np.complex128)
        if maps.ndim != 3:
            raise DimensionError(f"maps must have shape (n, N^2, d), got {maps.shape}")
        n, NN, d = maps.shape
        N = int(round(np.sqrt(NN)))
        if N * N != NN:
            raise DimensionError(f"map row count {NN} is not a perfect square")
        return cls(maps.reshape(n * NN, d), n, N)

    @property
    def maps(self) -> np.ndarray:
        """Array of shape ``(n, N**2, d)``; ``maps[i]`` is the matrix of ``G_i``."""
        return self.analysis_mat.reshape(self.n, self.N * self.N, self.d)

    @property
    def synthesis_mat(self) -> np.ndarray:
        return self.analysis_mat.conj().T

    @property
    def rows(self) -> int:
        return self.n * self.N * self.N

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.d, self.N, self.n)

    def require_frame(self) -> None:
        if not self.is_frame:
            raise NotAFrameError(
                f"lower frame bound {self.lower_sq:.3e} fails the gate "
                f"(upper {self.upper_sq:.3e})"
            )

    @property
    def frame_op_inv(self) -> np.ndarray:
        self.require_frame()
        return self._S_inv

    @property
    def frame_op_inv_sqrt(self) -> np.ndarray:
        self.require_frame()
        return self._S_inv_sqrt

    @property
    def frame_op_sqrt(self) -> np.ndarray:
        self.require_frame()
        return self._S_sqrt

    def with_analysis(self, U) -> "HSFrameSystem":
        return HSFrameSystem(U, self.n, self.N)

    def compose(self, Q) -> "HSFrameSystem":
        """The system ``{G_i Q}``."""
        return self.with_analysis(self.analysis_mat @ as_matrix(Q))

    def scaled(self, weights) -> "HSFrameSystem":
        """The system ``{w_i G_i}`` for a scalar or length-``n`` ``weights``."""
        w = np.broadcast_to(np.asarray(weights, dtype=np.complex128), (self.n,))
        return self.with_analysis(np.repeat(w, self.N * self.N)[:, None] * self.analysis_mat)

    def compatible(self, other: "HSFrameSystem") -> None:
        if self.shape != other.shape:
            raise DimensionError(f"system shapes (d, N, n) differ: {self.shape} vs {other.shape}")

    def __repr__(self):
        return f"HSFrameSystem(d={self.d}, N={self.N}, n={self.n})"


def _freeze(a):
    a.setflags(write=False)
    return a


def analysis(G: HSFrameSystem, f) -> OpSequence:
    f = as_vector(f)
    if f.size != G.d:
        raise DimensionError(f"vector length {f.size} != d = {G.d}")
    return OpSequence.from_flat(G.analysis_mat @ f, G.n, G.N)


def synthesis(G: HSFrameSystem, A: OpSequence) -> np.ndarray:
    """``sum_i G_i^* A_i``."""
    if (A.n, A.N) != (G.n, G.N):
        raise DimensionError(f"sequence (n={A.n}, N={A.N}) does not match system")
    return G.synthesis_mat @ A.flat()


def frame_bounds(G: HSFrameSystem) -> tuple[float, float]:
    """Optimal bounds in the squared convention: ``(lambda_min(S), lambda_max(S))``."""
    return G.lower_sq, G.upper_sq


def frame_bounds_unsquared(G: HSFrameSystem) -> tuple[float, float]:
    """Square roots of :func:`frame_bounds`."""
    return float(G.singular_values[-1]), float(G.singular_values[0])


def canonical_dual(G: HSFrameSystem) -> HSFrameSystem:
    """``{G_i S^{-1}}``."""
    return G.compose(G.frame_op_inv)


def _mixed_frame_op(G: HSFrameSystem, Gd: HSFrameSystem) -> np.ndarray:
    # T_G U_{Gd} = sum_i G_i^* Gd_i
    G.compatible(Gd)
    return G.synthesis_mat @ Gd.analysis_mat


def is_dual(Gd: HSFrameSystem, G: HSFrameSystem, tol: float = 1e-8) -> bool:
    """True iff ``||T_G U_{Gd} - I||_op <= tol``."""
    R = _mixed_frame_op(G, Gd) - np.eye(G.d)
    return bool(np.linalg.norm(R, 2) <= tol)


def dual_family(F: HSFrameSystem, H: HSFrameSystem) -> HSFrameSystem:
    """The dual ``{F_j S^{-1} + H_j - F_j S^{-1} T_F U_H}`` of ``F``.

    Every Bessel system ``H`` of the same shape gives a dual; ``H = 0``
    gives the canonical one.
    """
    F.compatible(H)
    F.require_frame()
    U, Sinv = F.analysis_mat, F.frame_op_inv
    UH = H.analysis_mat
    return F.with_analysis(U @ Sinv + UH - U @ (Sinv @ (F.synthesis_mat @ UH)))


def special_probe(F: HSFrameSystem, i: int, k: int, anchor=None) -> HSFrameSystem:
    """System whose only nonzero map is ``f -> <f, e'> E_k`` at index ``i``.

    ``anchor`` is the unit vector ``e'`` (default: first standard basis
    vector of ``C^d``).  Indices are zero-based.
    """
    NN = F.N * F.N
    if not (0 <= i < F.n) or not (0 <= k < NN):
        raise DomainError(f"probe index (i={i}, k={k}) out of range for n={F.n}, N^2={NN}")
    if anchor is None:
        anchor = np.zeros(F.d, dtype=np.complex128)
        anchor[0] = 1.0
    anchor = as_vector(anchor)
    if anchor.size != F.d:
        raise DimensionError(f"anchor length {anchor.size} != d = {F.d}")
    U = np.zeros((F.rows, F.d), dtype=np.complex128)
    U[i * NN + k] = anchor.conj()
    return F.with_analysis(U)


@dataclass(frozen=True)
class GeneralizedDualSpec:
    """Parameters ``(Q, Psi)`` of a generalized dual ``U_G S^{-1} Q + Psi``."""

    Q: np.ndarray
    Psi: np.ndarray

    def validate(self, G: HSFrameSystem, ker_rtol: float = 1e-10) -> None:
        Q = as_matrix(self.Q, square=True)
        Psi = as_matrix(self.Psi)
        if Q.shape[0] != G.d or Psi.shape != (G.rows, G.d):
            raise InvalidSpecError(
                f"spec shapes Q{Q.shape}, Psi{Psi.shape} do not fit system {G.shape}"
            )
        s = np.linalg.svd(Q, compute_uv=False)
        if not (s[0] > 0 and s[-1] > INVERTIBLE_RTOL * s[0]):
            raise InvalidSpecError(f"Q is singular (condition {s[0] / max(s[-1], 1e-300):.3e})")
        res = np.linalg.norm(G.synthesis_mat @ Psi, 2)
        scale = max(np.linalg.norm(Psi, 2), 1.0)
        if res > ker_rtol * scale:
            raise InvalidSpecError(f"Psi is not in ker(T_G): residual {res:.3e}")


def generalized_dual(G: HSFrameSystem, spec: GeneralizedDualSpec) -> HSFrameSystem:
    """``{G_i S^{-1} Q + pi_i Psi}``."""
    G.require_frame()
    spec.validate(G)
    return G.with_analysis(G.analysis_mat @ (G.frame_op_inv @ spec.Q) + spec.Psi)


def is_generalized_dual(Ggd: HSFrameSystem, G: HSFrameSystem, tol: float = INVERTIBLE_RTOL) -> bool:
    """True iff ``T_G U_{Ggd}`` passes the relative invertibility gate ``tol``."""
    s = np.linalg.svd(_mixed_frame_op(G, Ggd), compute_uv=False)
    return bool(s[0] > 0 and s[-1] > tol * s[0])


def recover_generalized_dual_spec(Ggd: HSFrameSystem, G: HSFrameSystem) -> GeneralizedDualSpec:
    """Inverse of :func:`generalized_dual`: ``Q = T_G U_gd``, ``Psi = U_gd - U_G S^{-1} Q``."""
    G.require_frame()
    Q = _mixed_frame_op(G, Ggd)
    Psi = Ggd.analysis_mat - G.analysis_mat @ (G.frame_op_inv @ Q)
    return GeneralizedDualSpec(Q=Q, Psi=Psi)


def kernel_basis(G: HSFrameSystem) -> np.ndarray:
    """Orthonormal columns spanning ``ker(T_G) = ran(U_G)^perp``."""
    G.require_frame()
    W, _, _ = np.linalg.svd(G.analysis_mat, full_matrices=True)
    return W[:, G.d:]


def kernel_bessel(G: HSFrameSystem, seed) -> np.ndarray:
    """Seeded random ``Psi`` of shape ``(n N^2, d)`` with ``T_G Psi = 0``.

    Returns zeros when ``n N^2 <= d`` (trivial kernel).
    """
    if G.rows <= G.d:
        return np.zeros((G.rows, G.d), dtype=np.complex128)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    X = rng.standard_normal((G.rows, G.d)) + 1j * rng.standard_normal((G.rows, G.d))
    K = kernel_basis(G)
    return K @ (K.conj().T @ X)


def range_projection(G: HSFrameSystem) -> np.ndarray:
    """Orthogonal projection ``U S^{-1} U^*`` onto ``ran(U_G)``."""
    U = G.analysis_mat
    P = U @ (G.frame_op_inv @ U.conj().T)
    return 0.5 * (P + P.conj().T)


def kernel_projection(G: HSFrameSystem) -> np.ndarray:
    """Orthogonal projection onto ``ker(T_G)``."""
    return np.eye(G.rows) - range_projection(G)


class RieszCheck(NamedTuple):
    """Outcome of :func:`is_riesz_basis`.

    ``lower``/``upper`` are the unsquared Riesz bounds ``sigma_min(U)`` and
    ``sigma_max(U)`` (over the smaller side of ``U``).  ``bounded_below``
    says the synthesis operator is injective on the whole direct sum,
    ``complete`` says the analysis operator is injective on ``K``.
    """

    is_riesz: bool
    lower: float
    upper: float
    bounded_below: bool
    complete: bool


def is_riesz_basis(G: HSFrameSystem, tol: float = INVERTIBLE_RTOL) -> RieszCheck:
    s = np.linalg.svd(G.analysis_mat, compute_uv=False)
    upper, lower = float(s[0]), float(s[-1])
    gate = upper > 0 and lower > tol * upper
    bounded_below = bool(G.rows <= G.d and gate)
    complete = bool(G.rows >= G.d and gate)
    return RieszCheck(bounded_below and complete, lower, upper, bounded_below, complete)


def systems_equal(F: HSFrameSystem, G: HSFrameSystem, tol: float = EQUALITY_TOL) -> bool:
    if F.shape != G.shape:
        return False
    return bool(np.linalg.norm(F.analysis_mat - G.analysis_mat, 2) <= tol)


def equivalence_operator(F: HSFrameSystem, G: HSFrameSystem, tol: float = 1e-8) -> Optional[np.ndarray]:
    """Least-squares ``Q`` with ``G_i = F_i Q`` for all ``i``, or ``None``."""
    F.compatible(G)
    F.require_frame()
    G.require_frame()
    Q, *_ = np.linalg.lstsq(F.analysis_mat, G.analysis_mat, rcond=None)
    res = np.linalg.norm(F.analysis_mat @ Q - G.analysis_mat, 2)
    if res > tol * np.linalg.norm(G.analysis_mat, 2):
        return None
    s = np.linalg.svd(Q, compute_uv=False)
    if not (s[0] > 0 and s[-1] > tol * s[0]):
        return None
    return Q


def equivalence_operator_normalized(F: HSFrameSystem, G: HSFrameSystem, tol: float = 1e-8) -> Optional[np.ndarray]:
    """``Q`` with ``G_i = F_i Q`` built from the normalized systems.

    With ``F' = F S_F^{-1/2}`` and ``G' = G S_G^{-1/2}`` the operator
    ``T_{G'} U_{F'}`` is unitary when the ranges coincide and
    ``Q = S_F^{-1/2} T_{F'} U_{G'} S_G^{1/2}``.  Returns ``None`` when the
    range projections differ by more than ``tol``.
    """
    F.compatible(G)
    if np.linalg.norm(range_projection(F) - range_projection(G), 2) > tol:
        return None
    Fn = F.compose(F.frame_op_inv_sqrt)
    Gn = G.compose(G.frame_op_inv_sqrt)
    Qc = Gn.synthesis_mat @ Fn.analysis_mat
    return F.frame_op_inv_sqrt @ Qc.conj().T @ G.frame_op_sqrt
