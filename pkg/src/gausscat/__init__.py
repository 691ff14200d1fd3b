"""Gaussian conditional morphisms over real, complex and quaternionic matrices."""

from .gauss import (
    ConditionalSplit,
    Gauss,
    GaussMorphism,
    compose,
    conditional_mp,
    conditional_mp13,
    tensor,
    verify_conditional,
)
from .matrix import Matrix
from .pinv import mp_inverse, verify_mp
from .scalar import Scalar, ScalarKind

__all__ = [
    "ConditionalSplit",
    "Gauss",
    "GaussMorphism",
    "Matrix",
    "Scalar",
    "ScalarKind",
    "compose",
    "conditional_mp",
    "conditional_mp13",
    "mp_inverse",
    "tensor",
    "verify_conditional",
    "verify_mp",
]
