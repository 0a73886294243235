"""Finitely generated commuting matrix semigroups."""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from shared.exceptions import DimensionMismatchError, InvalidInputError, NonCommutingError
from shared.logging_setup import get_logger
from services.linalg import NormKind, ScalarField, as_matrix, field_of, induced_norm

logger = get_logger(__name__)

COMMUTATION_TOL = 1e-10


@dataclass(frozen=True)
class AbelianAction:
    """Pairwise commuting square generators T_1..T_k on K^dim."""

    dim: int
    generators: List[np.ndarray] = field(repr=False)
    norm: NormKind = NormKind.L2
    names: List[str] = field(default_factory=list)

    @property
    def k(self) -> int:
        """Number of generators."""
        return len(self.generators)

    @property
    def field(self) -> ScalarField:
        """Scalar field of the generators."""
        return field_of(self.generators[0])

    @property
    def dtype(self) -> np.dtype:
        """numpy dtype of the generators."""
        return self.generators[0].dtype


def commutator_defect(first: np.ndarray, second: np.ndarray) -> float:
    """|AB - BA|_2 relative to 1 + |A|_2 |B|_2."""
    commutator = first @ second - second @ first
    return induced_norm(commutator) / (1.0 + induced_norm(first) * induced_norm(second))


def build_action(
    generators: Sequence,
    norm: NormKind = NormKind.L2,
    names: Optional[Sequence[str]] = None,
) -> AbelianAction:
    """
    Validate generators and build the action of the free abelian monoid.

    Args:
        generators: Square matrices of one size
        norm: Ambient vector norm
        names: Optional generator labels (default g1, g2, ...)

    Returns:
        AbelianAction
    """
    if len(generators) == 0:
        raise InvalidInputError("an action needs at least one generator")
    if names is None:
        names = [f"g{i + 1}" for i in range(len(generators))]
    names = list(names)
    if len(names) != len(generators):
        raise InvalidInputError("one name per generator is required")

    matrices = [as_matrix(g, name=names[i]) for i, g in enumerate(generators)]
    complex_valued = any(np.iscomplexobj(m) for m in matrices)
    if complex_valued:
        matrices = [m.astype(np.complex128) for m in matrices]

    dim = matrices[0].shape[0]
    for name, matrix in zip(names, matrices):
        if matrix.shape != (dim, dim):
            raise DimensionMismatchError(
                f"generator {name} has shape {matrix.shape}, expected ({dim}, {dim})",
                details={"generator": name, "shape": list(matrix.shape)},
            )

    for g in range(len(matrices)):
        for h in range(g + 1, len(matrices)):
            defect = commutator_defect(matrices[g], matrices[h])
            if defect > COMMUTATION_TOL:
                raise NonCommutingError(
                    f"generators {names[g]} and {names[h]} do not commute",
                    details={"witness": [names[g], names[h]], "defect": defect},
                )

    for matrix in matrices:
        matrix.setflags(write=False)
    logger.debug("action_built", dim=dim, generators=len(matrices), norm=NormKind(norm).value)
    return AbelianAction(dim=dim, generators=matrices, norm=NormKind(norm), names=names)


def word_apply(action: AbelianAction, exponents: Sequence[int], unital: bool = False) -> np.ndarray:
    """
    Evaluate T_1^a_1 ... T_k^a_k.

    Args:
        action: Commuting action
        exponents: Nonnegative multi-index of length k
        unital: Allow the empty word (returns I)

    Returns:
        The word as a dim x dim matrix
    """
    exponents = [int(a) for a in exponents]
    if len(exponents) != action.k:
        raise DimensionMismatchError(f"expected {action.k} exponents, got {len(exponents)}")
    if any(a < 0 for a in exponents):
        raise InvalidInputError("exponents must be nonnegative")
    if not unital and sum(exponents) == 0:
        raise InvalidInputError("the empty word needs a unital action")
    result = np.eye(action.dim, dtype=action.dtype)
    for generator, a in zip(action.generators, exponents):
        if a:
            result = result @ np.linalg.matrix_power(generator, a)
    return result
