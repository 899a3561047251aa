"""JSON persistence for matrices, sequences, symbols, systems and reports.

Complex matrices are stored as
``{"rows": r, "cols": c, "entries": [[re, im], ...]}`` in row-major order.
Floats are written with Python's shortest round-trip repr, so loading a file
gives back bit-identical arrays.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .errors import DimensionError, DomainError
from .hs_frames import HSFrameSystem
from .op_sequences import OpSequence, Symbol

__all__ = [
    "dump_json",
    "load_json",
    "matrix_from_json",
    "matrix_to_json",
    "opseq_from_json",
    "opseq_to_json",
    "symbol_from_json",
    "symbol_to_json",
    "system_from_json",
    "system_to_json",
]


def _pairs(values) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(values, dtype=np.complex128).reshape(-1)]


def _complex(entries, count: int) -> np.ndarray:
    arr = np.asarray(entries, dtype=float)
    if arr.shape != (count, 2):
        raise DimensionError(f"expected {count} [re, im] pairs, got array of shape {arr.shape}")
    return arr[:, 0] + 1j * arr[:, 1]


def matrix_to_json(A) -> dict:
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim != 2:
        raise DimensionError(f"expected a 2-d matrix, got shape {A.shape}")
    return {"rows": A.shape[0], "cols": A.shape[1], "entries": _pairs(A)}


def matrix_from_json(obj: dict) -> np.ndarray:
    try:
        rows, cols = int(obj["rows"]), int(obj["cols"])
        entries = obj["entries"]
    except (KeyError, TypeError) as exc:
        raise DomainError(f"malformed matrix object: {exc}") from None
    return _complex(entries, rows * cols).reshape(rows, cols)


def opseq_to_json(A: OpSequence) -> dict:
    return {"n": A.n, "N": A.N, "blocks": [matrix_to_json(b) for b in A.blocks]}


def opseq_from_json(obj: dict) -> OpSequence:
    blocks = [matrix_from_json(b) for b in obj["blocks"]]
    if len(blocks) != obj["n"] or any(b.shape != (obj["N"], obj["N"]) for b in blocks):
        raise DimensionError("block list does not match the declared n and N")
    return OpSequence(np.stack(blocks))


def symbol_to_json(m: Symbol) -> dict:
    return {"values": _pairs(m.values)}


def symbol_from_json(obj: dict) -> Symbol:
    vals = obj["values"]
    return Symbol(_complex(vals, len(vals)))


def system_to_json(G: HSFrameSystem) -> dict:
    return {"d": G.d, "N": G.N, "n": G.n, "maps": [matrix_to_json(b) for b in G.maps]}


def system_from_json(obj: dict) -> HSFrameSystem:
    d, N, n = int(obj["d"]), int(obj["N"]), int(obj["n"])
    maps = [matrix_from_json(b) for b in obj["maps"]]
    if len(maps) != n or any(b.shape != (N * N, d) for b in maps):
        raise DimensionError(f"maps do not match d={d}, N={N}, n={n}")
    return HSFrameSystem.from_maps(np.stack(maps))


def _default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _finite(o):
    # JSON has no inf/nan; store them as strings
    if isinstance(o, float) and not math.isfinite(o):
        return repr(o)
    if isinstance(o, dict):
        return {k: _finite(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_finite(v) for v in o]
    return o


def dump_json(obj, path) -> Path:
    """Write ``obj`` deterministically (fixed key order, trailing newline)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(_finite(obj), indent=1, default=_default, allow_nan=False)
    try:
        path.write_text(text + "\n", encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc
    return path


def load_json(path):
    path = Path(path)
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror}") from exc
