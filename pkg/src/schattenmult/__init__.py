"""Hilbert-Schmidt frame multipliers on finite-dimensional spaces.

Modules, bottom-up:

``schatten_core``  singular values, Schatten norms, rank-one tensors
``op_sequences``   direct sums of Schatten classes and symbols
``hs_frames``      HS-frame systems, duals, generalized duals, Riesz tests
``multipliers``    multiplier assembly, inverse formulas, Theta/Lambda maps
``banach_p``       general exponents over l^r spaces (sampled estimates)
``harness``        seeded generators and verification campaigns
"""

from .errors import (
    DimensionError,
    DomainError,
    InvalidSpecError,
    NotAFrameError,
    NotInvertibleError,
    SchattenMultError,
)
from .hs_frames import (
    GeneralizedDualSpec,
    HSFrameSystem,
    canonical_dual,
    dual_family,
    frame_bounds,
    frame_bounds_unsquared,
    generalized_dual,
    is_dual,
    is_riesz_basis,
)
from .multipliers import Multiplier, MultiplierReport, assemble, gamma, lambda_map, theta, theta_inverse
from .op_sequences import OpSequence, Symbol
from .schatten_core import SchattenOperator, schatten_norm, singular_values

__version__ = "0.1.0"

__all__ = [
    "DimensionError",
    "DomainError",
    "GeneralizedDualSpec",
    "HSFrameSystem",
    "InvalidSpecError",
    "Multiplier",
    "MultiplierReport",
    "NotAFrameError",
    "NotInvertibleError",
    "OpSequence",
    "SchattenMultError",
    "SchattenOperator",
    "Symbol",
    "assemble",
    "canonical_dual",
    "dual_family",
    "frame_bounds",
    "frame_bounds_unsquared",
    "gamma",
    "generalized_dual",
    "is_dual",
    "is_riesz_basis",
    "lambda_map",
    "schatten_norm",
    "singular_values",
    "theta",
    "theta_inverse",
]
