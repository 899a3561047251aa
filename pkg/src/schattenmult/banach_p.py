"""General Schatten exponents over finite-dimensional l^r spaces.

Here ``X = (C^d, ||.||_r)`` and a system is a family of linear maps
``G_i : C^d -> C^{N x N}`` stored, like :class:`~schattenmult.hs_frames.HSFrameSystem`,
as blocks ``G_hat_i`` of shape ``(N**2, d)`` acting on row-major vectorizations.

For ``p != 2`` the frame and Riesz constants have no closed form, so they are
estimated.  Every estimate carries two numbers:

* ``empirical``: the best value found by sampling the unit sphere and
  refining with finite-difference gradient steps.  For a supremum this is a
  lower bound, for an infimum an upper bound.
* ``certified``: a guaranteed bound on the other side, obtained from the
  exact ``p = r = 2`` singular values and sharp norm-equivalence factors.

Functionals on ``X`` are covectors paired bilinearly, ``<c, f> = sum_j c_j f_j``,
so ``tr(A G(f))`` defines a covector without any conjugation.  The dual norm
of a covector is its ``l^{r'}`` norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import minimize

from .errors import DimensionError, DomainError
from .hs_frames import HSFrameSystem
from .multipliers import MultiplierReport
from .op_sequences import Symbol
from .rng import complex_normal, make_rng
from .schatten_core import SchattenExponent, conjugate_exponent

__all__ = [
    "BoundEstimate",
    "BoundPair",
    "NormedSpaceSpec",
    "PBesselSystem",
    "REFINE_H",
    "REFINE_STEPS",
    "SAMPLING_SLACK",
    "assemble_general",
    "block_singular_values",
    "inequality_campaign",
    "lr_norm",
    "op_norm_estimate",
    "p_bessel_estimate",
    "q_riesz_estimate",
    "sharp_conjugate",
    "transpose_permutation",
]

REFINE_STEPS = 50
REFINE_STEP0 = 0.1
REFINE_H = 1e-5
REFINE_STARTS = 8
POLISH_MAXITER = 60
#: multiples of the scheduled step tried along each gradient direction
LINE_SEARCH = np.array([0.25, 0.5, 1.0, 2.0, 4.0, 8.0])
#: relative slack allowed when an empirical estimate stands in for an exact constant
SAMPLING_SLACK = 0.05


def lr_norm(x: np.ndarray, r: float, axis: int = -1) -> np.ndarray:
    """``l^r`` norm along ``axis``; ``r = inf`` gives the max modulus."""
    if r == 2:
        return np.sqrt(np.sum(x.real**2 + x.imag**2, axis=axis))
    a = np.abs(x)
    if r == 1:
        return a.sum(axis=axis)
    if math.isinf(r):
        return a.max(axis=axis)
    top = a.max(axis=axis, keepdims=True)
    safe = np.where(top > 0, top, 1.0)
    return np.squeeze(top, axis=axis) * np.sum((a / safe) ** r, axis=axis) ** (1.0 / r)


def block_singular_values(blocks: np.ndarray) -> np.ndarray:
    """Singular values of a stack of ``N x N`` blocks, shape ``(..., N)``.

    ``N = 1`` and ``N = 2`` use closed forms (``s1^2 + s2^2 = ||X||_F^2`` and
    ``s1 s2 = |det X|``); larger blocks go through LAPACK.
    """
    N = blocks.shape[-1]
    if N == 1:
        return np.abs(blocks[..., 0])
    if N == 2:
        fro2 = np.sum(np.abs(blocks) ** 2, axis=(-2, -1))
        det = np.abs(blocks[..., 0, 0] * blocks[..., 1, 1] - blocks[..., 0, 1] * blocks[..., 1, 0])
        disc = np.sqrt(np.maximum(fro2 * fro2 - 4 * det * det, 0.0))
        s1 = np.sqrt((fro2 + disc) / 2)
        s2 = np.where(s1 > 0, det / np.where(s1 > 0, s1, 1.0), 0.0)
        return np.stack([s1, s2], axis=-1)
    return np.linalg.svd(blocks, compute_uv=False)


def _inv(p: float) -> float:
    return 0.0 if math.isinf(p) else 1.0 / p


def _equiv_up(dim: int, lo: float, hi: float) -> float:
    """Smallest ``c`` with ``||x||_lo <= c ||x||_hi`` on ``C^dim`` is ``dim^(max(0, 1/lo - 1/hi))``."""
    return float(dim) ** max(0.0, _inv(lo) - _inv(hi))


@dataclass(frozen=True)
class NormedSpaceSpec:
    """``C^d`` with the ``l^r`` norm, ``1 <= r <= inf``."""

    d: int
    r: float

    def __post_init__(self):
        if self.d < 1:
            raise DomainError(f"dimension must be >= 1, got {self.d}")
        if not (1 <= self.r <= math.inf):
            raise DomainError(f"norm exponent must lie in [1, inf], got {self.r}")

    @property
    def dual_r(self) -> float:
        return conjugate_exponent(self.r)

    def norm(self, x, axis: int = -1):
        return lr_norm(np.asarray(x), self.r, axis)

    def dual_norm(self, c, axis: int = -1):
        return lr_norm(np.asarray(c), self.dual_r, axis)


class PBesselSystem:
    """Maps ``G_i : X -> C_p`` for an exponent ``1 < p < inf``."""

    def __init__(self, maps, p, space: NormedSpaceSpec):
        maps = np.asarray(maps, dtype=np.complex128)
        if maps.ndim != 3:
            raise DimensionError(f"maps must have shape (n, N**2, d), got {maps.shape}")
        n, N2, d = maps.shape
        N = math.isqrt(N2)
        if N * N != N2 or n < 1 or N < 1:
            raise DimensionError(f"second axis must be a nonzero square, got {N2}")
        if d != space.d:
            raise DimensionError(f"maps act on C^{d} but the space has d={space.d}")
        if not np.all(np.isfinite(maps)):
            raise DomainError("maps have non-finite entries")
        maps.setflags(write=False)
        self.maps = maps
        self.exponent = p if isinstance(p, SchattenExponent) else SchattenExponent(float(p))
        self.space = space
        self.n, self.N, self.d = n, N, d

    @classmethod
    def from_hs(cls, system: HSFrameSystem, p, r: float) -> "PBesselSystem":
        return cls(system.maps, p, NormedSpaceSpec(system.shape[0], r))

    @property
    def p(self) -> float:
        return self.exponent.p

    @property
    def stacked(self) -> np.ndarray:
        """Stacked analysis matrix of shape ``(n N**2, d)``."""
        return self.maps.reshape(self.n * self.N * self.N, self.d)

    def scaled(self, c) -> "PBesselSystem":
        return PBesselSystem(self.maps * c, self.exponent, self.space)

    def phi(self, f: np.ndarray) -> np.ndarray:
        """``(sum_i ||G_i f||_{C_p}^p)^(1/p)`` for each row of ``f``."""
        f = np.atleast_2d(f)
        blocks = np.einsum("iad,kd->kia", self.maps, f).reshape(-1, self.N, self.N)
        s = block_singular_values(blocks).reshape(f.shape[0], -1)
        return lr_norm(s, self.p)

    def synthesis_covector(self, A: np.ndarray) -> np.ndarray:
        """Covector ``f -> sum_i tr(A_i G_i f)`` for each row of ``A`` (flattened blocks).

        ``tr(A X) = (P vec A)^T vec X``, hence ``c = sum_i G_hat_i^T P vec(A_i)``.
        """
        A = np.atleast_2d(A).reshape(-1, self.n, self.N, self.N)
        At = np.swapaxes(A, -1, -2).reshape(A.shape[0], self.n, self.N * self.N)
        return np.einsum("iad,kia->kd", self.maps, At)

    def schatten_seq_norm(self, A: np.ndarray, s_exp: float) -> np.ndarray:
        A = np.atleast_2d(A).reshape(-1, self.N, self.N)
        s = block_singular_values(A).reshape(-1, self.n * self.N)
        return lr_norm(s, s_exp)

    def __repr__(self):
        return f"PBesselSystem(n={self.n}, N={self.N}, d={self.d}, p={self.p}, r={self.space.r})"


@dataclass(frozen=True)
class BoundEstimate:
    """Two-sided information about a supremum or an infimum.

    ``sense == "sup"``: ``empirical <= true <= certified``.
    ``sense == "inf"``: ``certified <= true <= empirical``.
    """

    empirical: float
    certified: float
    samples: int
    seed: int
    sense: str

    @property
    def lower(self) -> float:
        return self.empirical if self.sense == "sup" else self.certified

    @property
    def upper(self) -> float:
        return self.certified if self.sense == "sup" else self.empirical

    @property
    def consistent(self) -> bool:
        return self.lower <= self.upper * (1 + 1e-12) + 1e-300

    def scaled(self, c: float) -> "BoundEstimate":
        return BoundEstimate(self.empirical * c, self.certified * c, self.samples, self.seed, self.sense)

    def to_dict(self) -> dict:
        return {
            "empirical": self.empirical,
            "certified": self.certified,
            "samples": self.samples,
            "seed": self.seed,
            "sense": self.sense,
        }


@dataclass(frozen=True)
class BoundPair:
    """Lower constant ``A`` (an infimum) and upper constant ``B`` (a supremum)."""

    A: BoundEstimate
    B: BoundEstimate


def _refine(ratio: Callable[[np.ndarray], np.ndarray], X: np.ndarray, values: np.ndarray,
            sign: float, steps: int = REFINE_STEPS, h: float = REFINE_H) -> tuple[np.ndarray, np.ndarray]:
    """Normalized finite-difference gradient steps on a degree-0 homogeneous ``ratio``.

    Step ``t`` has base length ``0.1 / sqrt(t)``; the multiples in
    ``LINE_SEARCH`` are tried along the gradient direction and the best one
    is taken.
    ``sign = +1`` ascends, ``-1`` descends.  A step is kept only when it
    improves the value, so the returned values are never worse.
    """
    k, dim = X.shape
    X = X / np.linalg.norm(X, axis=1, keepdims=True)
    for t in range(1, steps + 1):
        grad = _fd_gradient(ratio, X, h)
        gn = np.linalg.norm(grad, axis=1, keepdims=True)
        move = np.where(gn > 0, grad / np.where(gn > 0, gn, 1.0), 0.0)
        base = REFINE_STEP0 / math.sqrt(t)
        # try the scheduled step and a few multiples of it, keep the best
        cand = X[:, None, :] + sign * base * LINE_SEARCH[None, :, None] * move[:, None, :]
        cand /= np.linalg.norm(cand, axis=2, keepdims=True)
        cv = ratio(cand.reshape(-1, dim)).reshape(k, LINE_SEARCH.size)
        j = np.argmax(sign * cv, axis=1)
        best_v = cv[np.arange(k), j]
        better = sign * (best_v - values) > 0
        X = np.where(better[:, None], cand[np.arange(k), j], X)
        values = np.where(better, best_v, values)
    return X, values


def _fd_gradient(ratio, X: np.ndarray, h: float = REFINE_H) -> np.ndarray:
    """Central differences of ``ratio`` at each row of ``X`` in one batched call."""
    k, dim = X.shape
    dirs = np.concatenate([np.eye(dim), 1j * np.eye(dim)]) * h
    pts = (X[:, None, :] + np.concatenate([dirs, -dirs])[None]).reshape(-1, dim)
    vals = ratio(pts).reshape(k, 2, 2 * dim)
    g = (vals[:, 0] - vals[:, 1]) / (2 * h)
    return g[:, :dim] + 1j * g[:, dim:]


def _polish(ratio, x: np.ndarray, value: float, sign: float, maxiter: int = POLISH_MAXITER) -> float:
    """Quasi-Newton polish of one start; returns the better of the old and new value."""
    dim = x.size
    x = x / np.linalg.norm(x)

    def fun(z):
        w = (z[:dim] + 1j * z[dim:])[None]
        v = float(ratio(w)[0])
        g = _fd_gradient(ratio, w)[0]
        return -sign * v, -sign * np.concatenate([g.real, g.imag])

    res = minimize(fun, np.concatenate([x.real, x.imag]), jac=True, method="L-BFGS-B",
                   options={"maxiter": maxiter, "gtol": 1e-12, "ftol": 1e-15})
    w = (res.x[:dim] + 1j * res.x[dim:])[None]
    v = float(ratio(w)[0]) if np.any(w) else value
    return v if sign * (v - value) > 0 else value


def _estimate(ratio, draw, samples: int, seed: int, sense: str, certified: float,
              refine: bool, starts: int | None = None) -> BoundEstimate:
    starts = REFINE_STARTS if starts is None else starts
    if samples < 1:
        raise DomainError(f"need at least one sample, got {samples}")
    X = draw(samples)
    values = ratio(X)
    sign = 1.0 if sense == "sup" else -1.0
    if refine:
        order = np.argsort(-sign * values, kind="stable")[: min(starts, samples)]
        Xr, refined = _refine(ratio, X[order], values[order], sign)
        top = int(np.argmax(sign * refined))
        polished = _polish(ratio, Xr[top], float(refined[top]), sign)
        values = np.concatenate([values, refined, [polished]])
    best = float(values.max() if sense == "sup" else values.min())
    return BoundEstimate(best, float(certified), int(samples), int(seed), sense)


def _safe_ratio(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    return np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)


def _sphere_sampler(rng: np.random.Generator, dim: int, norm: Callable) -> Callable[[int], np.ndarray]:
    def draw(k: int) -> np.ndarray:
        x = complex_normal(rng, (k, dim))
        return x / norm(x)[:, None]
    return draw


def _sv(mat: np.ndarray) -> np.ndarray:
    return np.linalg.svd(mat, compute_uv=False)


def p_bessel_estimate(G: PBesselSystem, samples: int = 1000, seed: int = 0, refine: bool = True) -> BoundPair:
    """Estimate the frame constants ``A <= Phi(f) / ||f||_r <= B``.

    Certificates: with ``n N`` singular values in ``Phi`` and ``d`` coordinates
    in ``f``, ``Phi_p <= (nN)^{max(0, 1/p - 1/2)} Phi_2`` and
    ``||f||_2 <= d^{max(0, 1/2 - 1/r)} ||f||_r``, and symmetrically for ``A``.
    """
    space, p = G.space, G.p
    rng = make_rng(seed, "p_bessel")
    ratio = lambda f: _safe_ratio(G.phi(f), space.norm(f))  # noqa: E731
    s = _sv(G.stacked)
    k = G.n * G.N
    b_cert = _equiv_up(k, p, 2) * (s[0] if s.size else 0.0) * _equiv_up(G.d, 2, space.r)
    s_low = s[G.d - 1] if G.stacked.shape[0] >= G.d else 0.0
    a_cert = s_low / (_equiv_up(k, 2, p) * _equiv_up(G.d, space.r, 2))
    draw = _sphere_sampler(rng, G.d, space.norm)
    X = draw(samples)  # both constants use the same sample set
    fixed = lambda k_: X[:k_]  # noqa: E731
    B = _estimate(ratio, fixed, samples, seed, "sup", b_cert, refine)
    A = _estimate(ratio, fixed, samples, seed, "inf", a_cert, refine)
    return BoundPair(A, B)


def q_riesz_estimate(G: PBesselSystem, samples: int = 1000, seed: int = 0, refine: bool = True) -> BoundPair:
    """Estimate ``A ||A||_q <= ||T_G A||_{X*} <= B ||A||_q`` with ``q`` conjugate to ``G.p``.

    ``T_G A`` is the covector ``f -> sum_i tr(A_i G_i f)`` measured in ``l^{r'}``.
    The certified infimum is ``0`` whenever ``n N**2 > d``, since ``T_G`` then
    has a kernel.
    """
    q = conjugate_exponent(G.p)
    space = G.space
    rng = make_rng(seed, "q_riesz")
    dim = G.n * G.N * G.N

    def ratio(a):
        return _safe_ratio(space.dual_norm(G.synthesis_covector(a)), G.schatten_seq_norm(a, q))

    s = _sv(G.stacked)
    k = G.n * G.N
    b_cert = _equiv_up(G.d, space.dual_r, 2) * s[0] * _equiv_up(k, 2, q)
    s_low = s[dim - 1] if dim <= G.d else 0.0
    a_cert = s_low / (_equiv_up(G.d, 2, space.dual_r) * _equiv_up(k, q, 2))
    draw = _sphere_sampler(rng, dim, lambda a: G.schatten_seq_norm(a, q))
    X = draw(samples)
    fixed = lambda k_: X[:k_]  # noqa: E731
    B = _estimate(ratio, fixed, samples, seed, "sup", b_cert, refine)
    A = _estimate(ratio, fixed, samples, seed, "inf", a_cert, refine)
    return BoundPair(A, B)


def transpose_permutation(N: int) -> np.ndarray:
    """``P`` with ``P vec(A) = vec(A^T)`` under row-major vectorization."""
    idx = np.arange(N * N).reshape(N, N).T.reshape(-1)
    P = np.zeros((N * N, N * N))
    P[np.arange(N * N), idx] = 1.0
    return P


def assemble_general(m: Symbol, F: PBesselSystem, G: PBesselSystem) -> np.ndarray:
    """Matrix of ``f -> (h -> sum_i m_i tr(G_i f F_i h))``, shape ``(d_F, d_G)``.

    Equal to ``sum_i m_i F_hat_i^T P G_hat_i``.
    """
    if F.n != G.n or F.N != G.N:
        raise DimensionError(f"systems disagree: (n, N) = ({F.n}, {F.N}) vs ({G.n}, {G.N})")
    if len(m) != G.n:
        raise DimensionError(f"symbol length {len(m)} != number of maps {G.n}")
    P = transpose_permutation(G.N)
    return np.einsum("i,iab,bc,icd->ad", m.values, np.swapaxes(F.maps, 1, 2), P, G.maps)


def sharp_conjugate(F: HSFrameSystem, q: float = 2.0, r: float = 2.0) -> PBesselSystem:
    """The system ``h -> F_i(conj h)^*``, blocks ``P conj(F_hat_i)``.

    With it ``assemble_general(m, sharp_conjugate(F), G)`` reproduces the
    Hilbert-space multiplier ``sum_i m_i F_i^* G_i``.
    """
    P = transpose_permutation(F.N)
    maps = np.einsum("ab,ibd->iad", P, F.maps.conj())
    return PBesselSystem(maps, q, NormedSpaceSpec(F.shape[0], r))


def op_norm_estimate(M: np.ndarray, r_in: float, r_out: float, samples: int = 1000,
                     seed: int = 0, refine: bool = True) -> BoundEstimate:
    """``sup ||M f||_{r_out} / ||f||_{r_in}`` with an equivalence-factor certificate."""
    M = np.asarray(M, dtype=np.complex128)
    d_out, d_in = M.shape
    rng = make_rng(seed, "op_norm")
    ratio = lambda f: _safe_ratio(lr_norm(f @ M.T, r_out), lr_norm(f, r_in))  # noqa: E731
    cert = _equiv_up(d_out, r_out, 2) * _sv(M)[0] * _equiv_up(d_in, 2, r_in)
    draw = _sphere_sampler(rng, d_in, lambda f: lr_norm(f, r_in))
    return _estimate(ratio, draw, samples, seed, "sup", cert, refine)


def inequality_campaign(m: Symbol, F: PBesselSystem, G: PBesselSystem, samples: int = 1000,
                        seed: int = 0, eps: float = SAMPLING_SLACK, refine: bool = True,
                        instance: dict | None = None) -> MultiplierReport:
    """Check the multiplier upper bound on samples and, for bijective pairs, the lower bound.

    ``G`` is ``p``-Bessel on ``X_1 = l^{r_1}``, ``F`` is ``q``-Bessel on
    ``X_2 = l^{r_2}`` with ``1/p + 1/q = 1``; ``M f`` lives in ``X_2* = l^{r_2'}``.

    Upper: ``||M f|| <= ||m||_inf B_F B_G ||f||`` on every sample, once with
    certified constants (exact inequality) and once with empirical constants
    (slack ``1 + eps``).  Lower, when both stacked shapes are square: ``A_F`` is
    the Riesz constant of ``T_F`` on ``(+)C_p``, ``A_G`` the lower frame constant
    of ``G``, and ``A_F A_G ||m||_inf <= (1 + eps) ||M||``.  The same bound
    applied to ``m - m'`` gives an injectivity check for ``m -> M``.
    """
    if not math.isclose(_inv(F.p) + _inv(G.p), 1.0, rel_tol=1e-12):
        raise DomainError(f"exponents must be conjugate, got p={G.p}, q={F.p}")
    M = assemble_general(m, F, G)
    r1, r2_dual = G.space.r, F.space.dual_r
    sup_m = m.sup_mod
    info = {"n": G.n, "N": G.N, "d1": G.d, "d2": F.d, "p": G.p, "r1": r1, "r2": F.space.r}
    rep = MultiplierReport(dict(info, **(instance or {})))

    bG = p_bessel_estimate(G, samples, seed, refine)
    bF = p_bessel_estimate(F, samples, seed + 1, refine)
    rng = make_rng(seed, "campaign_samples")
    f = complex_normal(rng, (samples, G.d))
    rho = _safe_ratio(lr_norm(f @ M.T, r2_dual), lr_norm(f, r1))
    worst = float(rho.max())
    cert_rhs = sup_m * bF.B.certified * bG.B.certified
    emp_rhs = sup_m * bF.B.empirical * bG.B.empirical
    rep.bound("upper_certified_all_samples", worst, cert_rhs * (1 + 1e-9))
    rep.bound("upper_empirical_all_samples", worst, emp_rhs * (1 + eps))
    norm_M = op_norm_estimate(M, r1, r2_dual, samples, seed + 2, refine)
    rep.bound("op_norm_estimate_le_certified", norm_M.empirical, cert_rhs * (1 + 1e-9))
    rep.residual("op_norm_empirical", norm_M.empirical)

    square = G.n * G.N**2 == G.d == F.d
    if not square:
        rep.skipped = "lower bound: stacked shapes are not square"
        return rep
    aG = bG.A
    aF = q_riesz_estimate(F, samples, seed + 3, refine).A
    if aG.empirical <= 0 or aF.empirical <= 0:
        rep.skipped = "lower bound: a Riesz constant estimate vanishes"
        return rep
    rep.bound("lower_certified", sup_m * aF.certified * aG.certified, norm_M.empirical * (1 + eps))
    rep.bound("lower_empirical", sup_m * aF.empirical * aG.empirical, norm_M.empirical * (1 + eps))

    drng = make_rng(seed, "campaign_delta")
    delta = Symbol(complex_normal(drng, G.n))
    norm_D = op_norm_estimate(assemble_general(delta, F, G), r1, r2_dual, samples, seed + 4, refine)
    rep.bound("injectivity", (1 - eps) * delta.sup_mod * aF.empirical * aG.empirical, norm_D.empirical)
    return rep
