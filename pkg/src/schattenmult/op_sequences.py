"""Finite direct sums of Schatten classes and diagonal symbol operators.

An :class:`OpSequence` holds ``n`` blocks of size ``N x N``.  Flattening a
sequence stacks the row-major vectorizations of its blocks, so block ``i``
entry ``k`` lands at flat index ``i * N**2 + k``.
"""

from __future__ import annotations

import math
from functools import cached_property

import numpy as np

from .errors import DimensionError, DomainError
from .schatten_core import _norm_from_sv, c2_basis, schatten_norm

__all__ = [
    "OpSequence",
    "Symbol",
    "basis_F",
    "seq_inner",
    "seq_p_norm",
    "symbol_apply",
    "symbol_op_matrix",
    "symbol_op_schatten_norm",
]


class OpSequence:
    """``n`` square blocks of common size ``N``; an element of the direct sum."""

    def __init__(self, blocks):
        blocks = np.asarray(blocks, dtype=np.complex128)
        if blocks.ndim != 3 or blocks.shape[1] != blocks.shape[2]:
            raise DimensionError(f"blocks must have shape (n, N, N), got {blocks.shape}")
        if blocks.shape[0] < 1 or blocks.shape[1] < 1:
            raise DimensionError("need at least one nonempty block")
        if not np.all(np.isfinite(blocks)):
            raise DomainError("blocks have non-finite entries")
        blocks.setflags(write=False)
        self.blocks = blocks

    @classmethod
    def zeros(cls, n: int, N: int) -> "OpSequence":
        return cls(np.zeros((n, N, N), dtype=np.complex128))

    @classmethod
    def from_flat(cls, v, n: int, N: int) -> "OpSequence":
        v = np.asarray(v, dtype=np.complex128)
        if v.size != n * N * N:
            raise DimensionError(f"flat vector of length {v.size} does not fit n={n}, N={N}")
        return cls(v.reshape(n, N, N))

    @property
    def n(self) -> int:
        return self.blocks.shape[0]

    @property
    def N(self) -> int:
        return self.blocks.shape[1]

    def flat(self) -> np.ndarray:
        return self.blocks.reshape(-1)

    def __len__(self):
        return self.n

    def __getitem__(self, i):
        return self.blocks[i]

    def __repr__(self):
        return f"OpSequence(n={self.n}, N={self.N})"


def seq_p_norm(A: OpSequence, p: float) -> float:
    """``(sum_i ||A_i||_{C_p}^p)^(1/p)``."""
    if p < 1:
        raise DomainError(f"exponent must be >= 1, got {p}")
    norms = np.array([schatten_norm(b, p) for b in A.blocks])
    if math.isinf(p):
        return float(norms.max())
    return _norm_from_sv(np.sort(norms)[::-1], p)


def seq_inner(A: OpSequence, B: OpSequence) -> complex:
    """``sum_i tr(B_i* A_i)``; linear in ``A``."""
    if A.blocks.shape != B.blocks.shape:
        raise DimensionError(f"shape mismatch {A.blocks.shape} vs {B.blocks.shape}")
    return complex(np.vdot(B.blocks, A.blocks))


def basis_F(i: int, k: int, n: int, N: int) -> OpSequence:
    """Sequence whose only nonzero block is block ``i``, equal to ``E_k``.

    Indices are zero-based: ``0 <= i < n`` and ``0 <= k < N**2``.
    """
    if not (0 <= i < n) or not (0 <= k < N * N):
        raise DomainError(f"index (i={i}, k={k}) out of range for n={n}, N={N}")
    blocks = np.zeros((n, N, N), dtype=np.complex128)
    blocks[i] = c2_basis(N)[k]
    return OpSequence(blocks)


class Symbol:
    """A finite complex symbol ``m = (m_1, ..., m_n)``."""

    def __init__(self, values):
        values = np.atleast_1d(np.asarray(values, dtype=np.complex128))
        if values.ndim != 1 or values.size < 1:
            raise DimensionError("symbol must be a nonempty 1-d sequence")
        if not np.all(np.isfinite(values)):
            raise DomainError("symbol has non-finite entries")
        values.setflags(write=False)
        self.values = values

    @classmethod
    def constant(cls, c, n: int) -> "Symbol":
        return cls(np.full(n, c, dtype=np.complex128))

    def __len__(self):
        return self.values.size

    @cached_property
    def moduli(self) -> np.ndarray:
        return np.abs(self.values)

    @property
    def sup_mod(self) -> float:
        return float(self.moduli.max())

    @property
    def inf_mod(self) -> float:
        return float(self.moduli.min())

    def lp_norm(self, p: float) -> float:
        if p < 1:
            raise DomainError(f"exponent must be >= 1, got {p}")
        return _norm_from_sv(np.sort(self.moduli)[::-1], p)

    def semi_normalized(self, rtol: float = 0.0) -> bool:
        """``inf |m_i| > rtol * sup |m_i|`` (plain positivity when ``rtol = 0``)."""
        return self.inf_mod > rtol * self.sup_mod and self.inf_mod > 0

    def conj(self) -> "Symbol":
        return Symbol(self.values.conj())

    def reciprocal(self) -> "Symbol":
        if self.inf_mod == 0:
            raise DomainError("symbol has a zero entry; 1/m undefined")
        return Symbol(1.0 / self.values)

    def expanded(self, N: int) -> np.ndarray:
        """Each ``m_i`` repeated ``N**2`` times."""
        return np.repeat(self.values, N * N)

    def __add__(self, other: "Symbol") -> "Symbol":
        return Symbol(self.values + other.values)

    def __sub__(self, other: "Symbol") -> "Symbol":
        return Symbol(self.values - other.values)

    def __mul__(self, c) -> "Symbol":
        return Symbol(self.values * c)

    __rmul__ = __mul__

    def __repr__(self):
        return f"Symbol(n={len(self)})"


def symbol_apply(m: Symbol, A: OpSequence) -> OpSequence:
    if len(m) != A.n:
        raise DimensionError(f"symbol length {len(m)} != sequence length {A.n}")
    return OpSequence(m.values[:, None, None] * A.blocks)


def symbol_op_matrix(m: Symbol, N: int) -> np.ndarray:
    """Diagonal matrix of the symbol operator on the flattened direct sum."""
    return np.diag(m.expanded(N))


def symbol_op_schatten_norm(m: Symbol, p: float, N: int) -> float:
    """Schatten norm of :func:`symbol_op_matrix`, measured by an actual SVD.

    The closed form ``(N**2)**(1/p) * ||m||_p`` is deliberately not used here.
    """
    if p < 1:
        raise DomainError(f"exponent must be >= 1, got {p}")
    return schatten_norm(symbol_op_matrix(m, N), p)
