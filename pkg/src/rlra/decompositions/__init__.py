"""Randomized and deterministic low-rank factorizations."""

from .dispatch import DECOMPOSITIONS, METHODS, factorize
from .interp import CurFactors, IdFactors, TwoSidedIdFactors
from .qb import QbFactors
from .rsvd import SvdFactors
from .sketch import SketchParams, SvdMethod, sample_left, sample_right

__all__ = [
    "DECOMPOSITIONS",
    "METHODS",
    "factorize",
    "CurFactors",
    "IdFactors",
    "TwoSidedIdFactors",
    "QbFactors",
    "SvdFactors",
    "SketchParams",
    "SvdMethod",
    "sample_left",
    "sample_right",
]
