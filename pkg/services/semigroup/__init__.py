"""Finite semigroups, invariant means and fixed points from means."""

from services.semigroup.constructions import (
    commuting_generation,
    direct_product,
    factor_embeddings,
    generated_subsemigroup,
    hom_image,
    unitize,
)
from services.semigroup.fixed_point import (
    AffineActionOnPoints,
    check_action_law,
    fixed_point_from_mean,
    fixed_point_residual,
    regular_affine_action,
)
from services.semigroup.mean import (
    MeanResult,
    MeanStatus,
    invariance_constraints,
    invariance_residual,
    product_mean,
    pushforward_mean,
    right_invariant_mean,
)
from services.semigroup.table import (
    FiniteSemigroup,
    identity_element,
    is_commutative,
    is_group,
    validate_table,
)

__all__ = [
    "AffineActionOnPoints",
    "FiniteSemigroup",
    "MeanResult",
    "MeanStatus",
    "check_action_law",
    "commuting_generation",
    "direct_product",
    "factor_embeddings",
    "fixed_point_from_mean",
    "fixed_point_residual",
    "generated_subsemigroup",
    "hom_image",
    "identity_element",
    "invariance_constraints",
    "invariance_residual",
    "is_commutative",
    "is_group",
    "product_mean",
    "pushforward_mean",
    "regular_affine_action",
    "right_invariant_mean",
    "unitize",
    "validate_table",
]
