"""Commuting projections onto invariant subspaces."""

from services.action import restricted_bound
from services.projection.commuting import (
    ProjectionProblem,
    ProjectionResult,
    commuting_projection,
    commuting_projection_family,
    minimal_projection_refine,
    projection_family,
    projection_residuals,
    relative_projection_constant,
)
from services.projection.descent import AffineNormMinimizer, DescentOutcome
from services.projection.invariance import Restriction, check_invariance, validate_subspace

__all__ = [
    "AffineNormMinimizer",
    "DescentOutcome",
    "ProjectionProblem",
    "ProjectionResult",
    "Restriction",
    "check_invariance",
    "commuting_projection",
    "commuting_projection_family",
    "minimal_projection_refine",
    "projection_family",
    "projection_residuals",
    "relative_projection_constant",
    "restricted_bound",
    "validate_subspace",
]
