"""Reproducible random streams.

Every random draw in the package goes through :func:`make_rng`, which builds
a ``numpy`` Philox generator (a 64-bit counter-based generator, Philox-4x64
with 10 rounds) keyed by ``SeedSequence([seed, crc32(stream)])``.  The
stream name lets independent consumers share one user-facing seed without
sharing draws, and the result does not depend on platform or thread count.
"""

from __future__ import annotations

import zlib

import numpy as np

from .errors import DomainError

__all__ = ["make_rng", "complex_normal"]


def make_rng(seed: int, stream: str = "") -> np.random.Generator:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or seed < 0:
        raise DomainError(f"seed must be a nonnegative integer, got {seed!r}")
    key = zlib.crc32(stream.encode("utf-8"))
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), key])))


def complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    """Standard complex Gaussian array.

    Real and imaginary parts are drawn interleaved along a trailing axis, so
    a longer draw along the leading axis extends a shorter one.
    """
    shape = (shape,) if isinstance(shape, int) else tuple(shape)
    z = rng.standard_normal(shape + (2,))
    return z[..., 0] + 1j * z[..., 1]
