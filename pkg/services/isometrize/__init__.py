"""Similarity to isometries, invariant renorming and enlarged bounds."""

from services.isometrize.enlarge import EnlargedBoundsReport, enlarged_bounds_check, signed_words
from services.isometrize.gram import (
    GramResult,
    IsometrizationResult,
    gram_orbit,
    invariant_gram,
    isometrize,
    sandwich_bounds,
)
from services.isometrize.renorm import InvariantNormResult, RenormKind, box_norm_mean, invariant_norm

__all__ = [
    "EnlargedBoundsReport",
    "GramResult",
    "InvariantNormResult",
    "IsometrizationResult",
    "RenormKind",
    "box_norm_mean",
    "enlarged_bounds_check",
    "gram_orbit",
    "invariant_gram",
    "invariant_norm",
    "isometrize",
    "sandwich_bounds",
    "signed_words",
]
