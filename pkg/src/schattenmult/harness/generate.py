"""Seeded random instances.

Frames are i.i.d. complex Gaussian analysis matrices rescaled to
``sigma_max(U) = 1``.  With ``target_cond`` set, the singular values are
replaced by a geometric ladder from ``1`` down to ``1 / target_cond``, so
``sigma_max(U) / sigma_min(U) = target_cond`` exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from ..errors import DomainError
from ..hs_frames import HSFrameSystem, frame_bounds_unsquared
from ..jsonio import dump_json, matrix_to_json, system_to_json
from ..op_sequences import Symbol
from ..rng import complex_normal, make_rng

__all__ = [
    "KINDS",
    "Dims",
    "equivalent_pair",
    "generate_instance",
    "perturbed_pair",
    "random_frame",
    "random_invertible",
    "random_riesz",
    "random_symbol",
]

KINDS = ("frame", "riesz", "equivalent-pair", "perturbed-pair")


@dataclass(frozen=True)
class Dims:
    d: int
    N: int
    n: int

    def __post_init__(self):
        if min(self.d, self.N, self.n) < 1:
            raise DomainError(f"all dimensions must be >= 1, got {self}")

    @property
    def rows(self) -> int:
        return self.n * self.N * self.N

    @property
    def riesz(self) -> bool:
        return self.rows == self.d

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.d, self.N, self.n)


def _as_dims(dims) -> Dims:
    return dims if isinstance(dims, Dims) else Dims(*dims)


def _with_singular_values(A: np.ndarray, target_cond: Optional[float]) -> np.ndarray:
    W, s, Vh = np.linalg.svd(A, full_matrices=False)
    if target_cond is None:
        return A / s[0]
    if target_cond < 1:
        raise DomainError(f"target_cond must be >= 1, got {target_cond}")
    k = s.size
    ladder = target_cond ** (-np.arange(k) / max(k - 1, 1))
    return (W * ladder) @ Vh


def random_frame(dims, rng: np.random.Generator, target_cond: Optional[float] = None) -> HSFrameSystem:
    dims = _as_dims(dims)
    if dims.rows < dims.d:
        raise DomainError(f"n*N^2 = {dims.rows} < d = {dims.d}: no frame exists")
    U = _with_singular_values(complex_normal(rng, (dims.rows, dims.d)), target_cond)
    return HSFrameSystem(U, dims.n, dims.N)


def random_riesz(dims, rng: np.random.Generator, target_cond: Optional[float] = None) -> HSFrameSystem:
    dims = _as_dims(dims)
    if not dims.riesz:
        raise DomainError(f"Riesz instances need n*N^2 = d, got {dims.rows} vs {dims.d}")
    return random_frame(dims, rng, target_cond)


def random_invertible(d: int, rng: np.random.Generator, cond: float = 10.0) -> np.ndarray:
    return _with_singular_values(complex_normal(rng, (d, d)), cond)


def random_symbol(n: int, rng: np.random.Generator, low: float = 0.5, high: float = 2.0) -> Symbol:
    """Moduli uniform in ``[low, high]``, phases uniform."""
    mod = rng.uniform(low, high, n)
    return Symbol(mod * np.exp(2j * np.pi * rng.uniform(size=n)))


def equivalent_pair(dims, rng: np.random.Generator, target_cond: Optional[float] = 10.0):
    """``(F, G, Q)`` with ``G_i = F_i Q`` for a planted invertible ``Q``."""
    dims = _as_dims(dims)
    F = random_frame(dims, rng, target_cond)
    Q = random_invertible(dims.d, rng)
    return F, F.compose(Q), Q


def perturbed_pair(dims, rng: np.random.Generator, target_cond: Optional[float] = 10.0,
                   fraction: Optional[float] = None):
    """``(G, G', gap, bound)`` with ``gap = ||T_G - T_G'|| < bound = sqrt(A_G)/2``.

    The perturbation is rescaled so that ``gap = fraction * bound`` with
    ``fraction`` drawn from ``[0.1, 0.9]`` unless given.
    """
    dims = _as_dims(dims)
    G = random_frame(dims, rng, target_cond)
    bound = frame_bounds_unsquared(G)[0] / 2
    if fraction is None:
        fraction = float(rng.uniform(0.1, 0.9))
    if not (0 <= fraction < 1):
        raise DomainError(f"fraction must lie in [0, 1), got {fraction}")
    D = complex_normal(rng, (dims.rows, dims.d))
    D *= fraction * bound / np.linalg.norm(D, 2)
    Gp = G.with_analysis(G.analysis_mat + D)
    gap = float(np.linalg.norm(Gp.analysis_mat - G.analysis_mat, 2))
    return G, Gp, gap, bound


def generate_instance(kind: str, dims, seed: int, out_dir=None, target_cond: Optional[float] = None) -> dict:
    """Build an instance of ``kind`` and optionally write it under ``out_dir``.

    Returns a manifest with the system JSON objects, post-checks and, when
    written, the file paths.  Output is a pure function of the arguments.
    """
    if kind not in KINDS:
        raise DomainError(f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}")
    dims = _as_dims(dims)
    rng = make_rng(seed, f"generate:{kind}")
    info = {"kind": kind, "seed": seed, "d": dims.d, "N": dims.N, "n": dims.n, "target_cond": target_cond}
    systems: dict[str, HSFrameSystem] = {}
    if kind in ("frame", "riesz"):
        G = (random_riesz if kind == "riesz" else random_frame)(dims, rng, target_cond)
        systems["G"] = G
        info["sigma_min"] = float(G.singular_values[-1])
        info["sigma_max"] = float(G.singular_values[0])
    elif kind == "equivalent-pair":
        F, G, Q = equivalent_pair(dims, rng, target_cond or 10.0)
        systems.update(F=F, G=G)
        info["Q"] = matrix_to_json(Q)
    else:
        G, Gp, gap, bound = perturbed_pair(dims, rng, target_cond or 10.0)
        systems.update(G=G, Gp=Gp)
        info.update(gap=gap, bound=bound, gap_below_bound=bool(gap < bound))
    manifest = {"info": info, "systems": {k: system_to_json(v) for k, v in systems.items()}}
    if out_dir is not None:
        out = Path(out_dir)
        stem = f"{kind}_d{dims.d}_N{dims.N}_n{dims.n}_s{seed}"
        paths = {k: str(dump_json(obj, out / f"{stem}_{k}.json")) for k, obj in manifest["systems"].items()}
        paths["info"] = str(dump_json(info, out / f"{stem}_info.json"))
        manifest["paths"] = paths
    return manifest

