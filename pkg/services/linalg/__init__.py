"""Dense linear algebra kernel."""

from services.linalg.factorizations import (
    checked_inverse,
    condition_number,
    hermitian_part,
    polar_decompose,
    psd_sqrt,
)
from services.linalg.norms import frobenius, induced_norm, lower_norm, vector_norm
from services.linalg.subspaces import (
    orthogonal_projector,
    principal_angles,
    solve_affine_system,
    span,
    subspace_combine,
    subspace_distance,
    subspace_from_matrix,
)
from services.linalg.types import (
    AffineSet,
    NormKind,
    ScalarField,
    Subspace,
    as_matrix,
    common_dtype,
    field_of,
)

__all__ = [
    "AffineSet",
    "NormKind",
    "ScalarField",
    "Subspace",
    "as_matrix",
    "checked_inverse",
    "common_dtype",
    "condition_number",
    "field_of",
    "frobenius",
    "hermitian_part",
    "induced_norm",
    "lower_norm",
    "orthogonal_projector",
    "polar_decompose",
    "principal_angles",
    "psd_sqrt",
    "solve_affine_system",
    "span",
    "subspace_combine",
    "subspace_distance",
    "subspace_from_matrix",
    "vector_norm",
]
