"""Fixed-space / range decomposition of a commuting action and its projection."""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from shared.config import get_config
from shared.exceptions import (
    BoundViolationError,
    ConvergenceError,
    NotDirectSumError,
    RouteDisagreementError,
)
from shared.logging_setup import get_logger
from shared.utils import to_nested_list
from services.action import (
    AbelianAction,
    BoundEstimate,
    ConvergenceReport,
    ConvergenceStatus,
    FolnerSchedule,
    OrbitMap,
    WordEvaluator,
    estimate_bounds,
    folner_average,
    iter_exponents,
)
from services.linalg import (
    Subspace,
    induced_norm,
    principal_angles,
    subspace_combine,
    subspace_from_matrix,
)
from services.linalg.subspaces import INTERSECTION, KERNEL, RANGE, SUM

logger = get_logger(__name__)

DIRECT_SUM_ANGLE = 1e-6
BOUND_SLACK = 1e-6


@dataclass
class Check:
    """One verified property of a result."""

    name: str
    passed: bool
    value: Optional[float] = None
    limit: Optional[float] = None
    skipped: bool = False

    def to_dict(self) -> Dict[str, Any]:
        """Report payload."""
        return {
            "name": self.name,
            "passed": self.passed,
            "value": self.value,
            "limit": self.limit,
            "skipped": self.skipped,
        }


@dataclass
class Decomposition:
    """N (+) R with the projection onto N along R."""

    fixed: Subspace
    range: Subspace
    domain: Subspace
    projection: np.ndarray
    pnorm: float
    mbound: float
    min_angle: float
    diagnostic: bool
    bounds: BoundEstimate
    averaging: Optional[ConvergenceReport]
    commutation_residual: float
    checks: List[Check] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        """Report payload."""
        return {
            "dimN": self.fixed.dim,
            "projection": to_nested_list(self.projection),
            "dimR": self.range.dim,
            "dimD": self.domain.dim,
            "pnorm": self.pnorm,
            "mbound": self.mbound,
            "min_angle": self.min_angle,
            "diagnostic": self.diagnostic,
            "commutation_residual": self.commutation_residual,
            "checks": [c.to_dict() for c in self.checks],
            "bounds": self.bounds.to_dict(),
            "averaging": self.averaging.to_dict() if self.averaging else None,
        }


def fixed_subspace(action: AbelianAction, rtol: Optional[float] = None) -> Subspace:
    """
    Common fixed vectors: the intersection of ker(T_g - I) over generators.

    Args:
        action: Commuting action
        rtol: Rank tolerance

    Returns:
        Subspace N
    """
    identity = np.eye(action.dim, dtype=action.dtype)
    result: Optional[Subspace] = None
    for generator in action.generators:
        kernel = subspace_from_matrix(generator - identity, KERNEL, rtol)
        result = kernel if result is None else subspace_combine(result, kernel, INTERSECTION, rtol)
    return result


def range_span(action: AbelianAction, rtol: Optional[float] = None) -> Subspace:
    """
    Sum of ran(T_g - I) over generators.

    Args:
        action: Commuting action
        rtol: Rank tolerance

    Returns:
        Subspace R
    """
    identity = np.eye(action.dim, dtype=action.dtype)
    stacked = np.hstack([generator - identity for generator in action.generators])
    return subspace_from_matrix(stacked, RANGE, rtol)


def word_oracle(action: AbelianAction, max_length: int = 6, rtol: Optional[float] = None) -> Tuple[Subspace, Subspace]:
    """
    N and R by brute force over every word of length <= max_length.

    Args:
        action: Commuting action
        max_length: Largest word length
        rtol: Rank tolerance

    Returns:
        (N, R) computed from words rather than generators
    """
    identity = np.eye(action.dim, dtype=action.dtype)
    evaluator = WordEvaluator(action)
    differences = [evaluator.evaluate(w) - identity for w in iter_exponents(action.k, max_length)]
    fixed = subspace_from_matrix(np.vstack(differences), KERNEL, rtol)
    ranges = subspace_from_matrix(np.hstack(differences), RANGE, rtol)
    return fixed, ranges


def _direct_sum_projection(fixed: Subspace, ranges: Subspace) -> np.ndarray:
    """Projection onto N along R from the basis [N R]."""
    if fixed.dim == 0:
        return np.zeros((fixed.ambient, fixed.ambient), dtype=fixed.basis.dtype)
    frame = np.hstack([fixed.basis, ranges.basis])
    coordinates = np.linalg.inv(frame)
    return fixed.basis @ coordinates[: fixed.dim]


def ergodic_decomposition(
    action: AbelianAction,
    schedule: Optional[FolnerSchedule] = None,
    depth: Optional[int] = None,
) -> Decomposition:
    """
    Split the space into fixed vectors and the span of T_g x - x.

    The projection is computed exactly from the direct sum and by
    averaging x -> T_g x over Følner boxes seeded at I; both must agree.
    Actions without power-bounded evidence run in diagnostic mode: bound
    checks are skipped and averaging failures are recorded, not raised.

    Args:
        action: Commuting action
        schedule: Følner schedule (default for action.k)
        depth: Word depth for the bound estimate

    Returns:
        Decomposition
    """
    config = get_config()
    route_tol = config.projection.route_tol
    residual_tol = config.projection.residual_tol
    if schedule is None:
        schedule = FolnerSchedule.default(action.k)

    bounds = estimate_bounds(action, depth)
    diagnostic = not (bounds.upper_stabilized and np.isfinite(bounds.upper))
    checks: List[Check] = []

    fixed = fixed_subspace(action)
    ranges = range_span(action)
    domain = subspace_combine(fixed, ranges, SUM)
    angles = principal_angles(fixed, ranges)
    min_angle = float(angles[0]) if angles.size else float(np.pi / 2)
    if fixed.dim + ranges.dim != action.dim or min_angle <= DIRECT_SUM_ANGLE:
        raise NotDirectSumError(
            "fixed space and range span do not form a direct sum",
            details={
                "dimN": fixed.dim,
                "dimR": ranges.dim,
                "dim": action.dim,
                "min_angle": min_angle,
                "power_bounded": not diagnostic,
            },
        )
    checks.append(Check("direct_sum", True, value=min_angle, limit=DIRECT_SUM_ANGLE))

    projection = _direct_sum_projection(fixed, ranges)

    orbit = OrbitMap(
        [lambda x, t=t: t @ x for t in action.generators],
        shape=(action.dim, action.dim),
        dtype=action.dtype,
        name="cesaro_projection",
    )
    averaged, report = folner_average(orbit, np.eye(action.dim, dtype=action.dtype), schedule)
    if report.status == ConvergenceStatus.CONVERGED:
        gap = float(np.linalg.norm(averaged - projection))
        if gap > route_tol:
            raise RouteDisagreementError(
                "exact and averaged projections disagree",
                details={
                    "gap": gap,
                    "exact": to_nested_list(projection),
                    "averaged": to_nested_list(averaged),
                },
            )
        checks.append(Check("route_agreement", True, value=gap, limit=route_tol))
    elif diagnostic:
        checks.append(Check("route_agreement", False, skipped=True))
    else:
        raise ConvergenceError(
            "Cesàro averages of the action did not converge",
            report=report,
            details={"status": report.status.value},
        )

    idempotence = float(np.linalg.norm(projection @ projection - projection, 2))
    checks.append(Check("idempotent", idempotence <= residual_tol, value=idempotence, limit=residual_tol))

    commutation = max(
        float(np.linalg.norm(projection @ t - t @ projection, 2)) / (1.0 + induced_norm(t))
        for t in action.generators
    )
    checks.append(Check("commutes", commutation <= residual_tol, value=commutation, limit=residual_tol))

    pnorm = induced_norm(projection, action.norm)
    if diagnostic:
        checks.append(Check("projection_bound", False, value=pnorm, limit=bounds.upper, skipped=True))
    else:
        limit = bounds.upper + BOUND_SLACK
        passed = pnorm <= limit
        checks.append(Check("projection_bound", passed, value=pnorm, limit=limit))
        if not passed:
            raise BoundViolationError(
                "projection norm exceeds the estimated power bound",
                details={"pnorm": pnorm, "mbound": bounds.upper},
            )

    logger.info(
        "ergodic_decomposition",
        dimN=fixed.dim,
        dimR=ranges.dim,
        pnorm=pnorm,
        mbound=bounds.upper,
        diagnostic=diagnostic,
    )
    return Decomposition(
        fixed=fixed,
        range=ranges,
        domain=domain,
        projection=projection,
        pnorm=pnorm,
        mbound=bounds.upper,
        min_angle=min_angle,
        diagnostic=diagnostic,
        bounds=bounds,
        averaging=report,
        commutation_residual=commutation,
        checks=checks,
    )
