"""Right invariant means on finite semigroups."""

from dataclasses import dataclass
from enum import Enum
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from shared.config import get_config
from shared.exceptions import CertificateError, NumericalError
from shared.logging_setup import get_logger
from services.semigroup.simplex import PhaseOneSimplex
from services.semigroup.table import FiniteSemigroup

logger = get_logger(__name__)


class MeanStatus(str, Enum):
    """Outcome of the invariant-mean feasibility problem."""

    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"


@dataclass
class MeanResult:
    """Invariant mean or a Farkas certificate of its nonexistence."""

    status: MeanStatus
    weights: Optional[np.ndarray]
    certificate: Optional[np.ndarray]
    residual: float
    margin: Optional[float] = None
    pivots: int = 0

    @property
    def feasible(self) -> bool:
        """True when a mean was found."""
        return self.status == MeanStatus.FEASIBLE


def invariance_constraints(semigroup: FiniteSemigroup) -> Tuple[np.ndarray, np.ndarray]:
    """
    Equality system for a right invariant mean.

    Row 0 is sum(phi) = 1. Row 1 + s*n + u is
    sum over t with t*s = u of phi(t), minus phi(u), equal to 0.

    Args:
        semigroup: S of order n

    Returns:
        (A, b) with A of shape (1 + n*n, n)
    """
    n = semigroup.order
    table = semigroup.table
    elements = np.arange(n)
    coefficients = np.zeros((1 + n * n, n))
    coefficients[0] = 1.0
    for s in range(n):
        translation = (table[:, s][None, :] == elements[:, None]).astype(np.float64)
        coefficients[1 + s * n:1 + (s + 1) * n] = translation - np.eye(n)
    rhs = np.zeros(1 + n * n)
    rhs[0] = 1.0
    return coefficients, rhs


def _reduce_rows(coefficients: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Indices of the first occurrence of each distinct nonzero row."""
    augmented = np.hstack([coefficients, rhs[:, None]])
    nonzero = np.flatnonzero(np.any(augmented != 0, axis=1))
    _, first = np.unique(augmented[nonzero], axis=0, return_index=True)
    return np.sort(nonzero[first])


def pushforward(semigroup: FiniteSemigroup, weights: np.ndarray, s: int) -> np.ndarray:
    """Image of a weight vector under the right translation t -> t*s."""
    return np.bincount(semigroup.right_translation(s), weights=weights, minlength=semigroup.order)


def invariance_residual(semigroup: FiniteSemigroup, weights: np.ndarray) -> float:
    """
    Worst violation of the mean conditions.

    Args:
        semigroup: S
        weights: Candidate probability vector

    Returns:
        max of the translation defects, |sum - 1| and negative mass
    """
    weights = np.asarray(weights, dtype=np.float64)
    defects = [
        float(np.abs(pushforward(semigroup, weights, s) - weights).max())
        for s in range(semigroup.order)
    ]
    normalization = abs(float(weights.sum()) - 1.0)
    negativity = float(max(0.0, -weights.min()))
    return max(max(defects), normalization, negativity)


def right_invariant_mean(
    semigroup: FiniteSemigroup,
    config: Optional[Dict] = None,
) -> MeanResult:
    """
    Find a right invariant mean or certify that none exists.

    Args:
        semigroup: Validated finite semigroup
        config: Optional LP configuration dictionary

    Returns:
        MeanResult (feasible with weights, or infeasible with certificate)
    """
    if config is None:
        lp = get_config().lp
        config = {
            "pivot_tol": lp.pivot_tol,
            "feasibility_tol": lp.feasibility_tol,
            "max_pivot_factor": lp.max_pivot_factor,
            "certificate_margin": lp.certificate_margin,
        }

    coefficients, rhs = invariance_constraints(semigroup)
    kept = _reduce_rows(coefficients, rhs)
    outcome = PhaseOneSimplex(config).solve(coefficients[kept], rhs[kept])

    if outcome.feasible:
        weights = np.clip(outcome.x, 0.0, None)
        weights = weights / weights.sum()
        residual = invariance_residual(semigroup, weights)
        if residual > config["feasibility_tol"]:
            raise NumericalError(
                "invariant mean failed verification",
                details={"residual": residual},
            )
        logger.info(
            "invariant_mean_found",
            order=semigroup.order,
            pivots=outcome.pivots,
            residual=residual,
        )
        return MeanResult(
            status=MeanStatus.FEASIBLE,
            weights=weights,
            certificate=None,
            residual=residual,
            pivots=outcome.pivots,
        )

    certificate = np.zeros(rhs.shape[0])
    certificate[kept] = -outcome.duals
    margin = certificate_margin(coefficients, rhs, certificate)
    if margin < config["certificate_margin"]:
        raise CertificateError(
            "infeasibility certificate failed verification",
            details={"margin": margin, "infeasibility": outcome.infeasibility},
        )
    logger.info(
        "invariant_mean_infeasible",
        order=semigroup.order,
        pivots=outcome.pivots,
        margin=margin,
    )
    return MeanResult(
        status=MeanStatus.INFEASIBLE,
        weights=None,
        certificate=certificate,
        residual=outcome.infeasibility,
        margin=margin,
        pivots=outcome.pivots,
    )


def certificate_margin(coefficients: np.ndarray, rhs: np.ndarray, certificate: np.ndarray) -> float:
    """
    Gap by which a Farkas vector z excludes every x >= 0 with A x = b.

    Any feasible x has sum 1, so z^T A x >= min(0, min(A^T z)), while
    z^T b is the value it would have to equal.

    Returns:
        min(0, min(A^T z)) - b^T z; positive means certified infeasible
    """
    reduced = coefficients.T @ certificate
    return float(min(0.0, reduced.min()) - rhs @ certificate)


def pushforward_mean(
    semigroup: FiniteSemigroup,
    mapping: Sequence[int],
    weights: np.ndarray,
) -> np.ndarray:
    """
    Push a mean forward along a surjective homomorphism.

    Args:
        semigroup: S
        mapping: f onto 0..m-1
        weights: Invariant mean on S

    Returns:
        Weights on the image, phi(f^-1(u)) at u
    """
    f = np.asarray(mapping, dtype=np.int64)
    return np.bincount(f, weights=np.asarray(weights, dtype=np.float64), minlength=int(f.max()) + 1)


def product_mean(first_weights: np.ndarray, second_weights: np.ndarray) -> np.ndarray:
    """Tensor product mean in row-major product indexing."""
    return np.kron(np.asarray(first_weights), np.asarray(second_weights))
