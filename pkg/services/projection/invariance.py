"""Invariance of a subspace under a commuting action."""

from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np

from shared.config import get_config
from shared.exceptions import (
    DimensionMismatchError,
    InvalidInputError,
    InvarianceViolationError,
    SingularRestrictionError,
)
from shared.logging_setup import get_logger
from services.action import AbelianAction
from services.linalg import Subspace, condition_number, induced_norm

logger = get_logger(__name__)


@dataclass
class Restriction:
    """T_g restricted to Y in the orthonormal basis of Y."""

    matrices: List[np.ndarray]
    inverses: List[np.ndarray]
    conditions: List[float]
    residuals: List[float]

    def to_dict(self) -> Dict:
        """Report payload."""
        return {
            "conditions": list(self.conditions),
            "residuals": list(self.residuals),
        }


def validate_subspace(action: AbelianAction, subspace: Subspace, proper: bool = True) -> None:
    """
    Check that a subspace lives in the action's space.

    Args:
        action: Commuting action
        subspace: Candidate subspace
        proper: Require 0 < dim Y < ambient
    """
    if subspace.ambient != action.dim:
        raise DimensionMismatchError(
            f"subspace lives in dimension {subspace.ambient}, action in {action.dim}",
        )
    if proper and not 0 < subspace.dim < subspace.ambient:
        raise InvalidInputError(
            "subspace must be nontrivial and proper",
            details={"dim": subspace.dim, "ambient": subspace.ambient},
        )


def check_invariance(
    action: AbelianAction,
    subspace: Subspace,
    tol: Optional[float] = None,
) -> Restriction:
    """
    Verify T_g(Y) = Y and return the restricted matrices.

    T_g(Y) is contained in Y when (I - Pi_Y) T_g Pi_Y vanishes; equality
    then follows from invertibility of the restriction.

    Args:
        action: Commuting action
        subspace: Y
        tol: Invariance tolerance relative to 1 + |T_g|

    Returns:
        Restriction with matrices, inverses and condition numbers
    """
    config = get_config()
    if tol is None:
        tol = config.projection.invariance_tol
    max_condition = config.linalg.max_condition
    validate_subspace(action, subspace, proper=False)

    basis = subspace.basis.astype(np.result_type(subspace.basis, action.dtype))
    complement = np.eye(action.dim) - basis @ basis.conj().T
    matrices, inverses, conditions, residuals = [], [], [], []
    for name, generator in zip(action.names, action.generators):
        residual = float(np.linalg.norm(complement @ generator @ basis, 2)) if subspace.dim else 0.0
        residuals.append(residual)
        if residual > tol * (1.0 + induced_norm(generator)):
            logger.warning("invariance_violated", generator=name, residual=residual)
            raise InvarianceViolationError(
                f"{name} does not map Y into Y",
                details={"generator": name, "residual": residual},
            )
        restricted = basis.conj().T @ generator @ basis
        condition = condition_number(restricted)
        conditions.append(condition)
        if not np.isfinite(condition) or condition > max_condition:
            logger.warning("restriction_singular", generator=name, condition=condition)
            raise SingularRestrictionError(
                f"{name} maps Y onto a proper subspace of Y",
                details={"generator": name, "condition": condition},
            )
        matrices.append(restricted)
        inverses.append(np.linalg.inv(restricted))
    return Restriction(matrices=matrices, inverses=inverses, conditions=conditions, residuals=residuals)
