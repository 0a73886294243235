"""Projections onto invariant subspaces that commute with the action."""

from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from shared.config import get_config
from shared.exceptions import (
    DimensionMismatchError,
    NoCommutingProjectionError,
    RouteDisagreementError,
)
from shared.logging_setup import get_logger
from shared.utils import to_nested_list
from services.action import (
    AbelianAction,
    ConvergenceReport,
    ConvergenceStatus,
    FolnerSchedule,
    GrowthEstimate,
    OrbitMap,
    folner_average,
    restricted_bound,
)
from services.ergodic import Check
from services.linalg import (
    AffineSet,
    NormKind,
    Subspace,
    induced_norm,
    solve_affine_system,
    span,
    subspace_distance,
)
from services.projection.descent import AffineNormMinimizer
from services.projection.invariance import Restriction, check_invariance, validate_subspace

logger = get_logger(__name__)

BOUND_SLACK = 1e-6
UNIT_NORM_TOL = 1e-9


@dataclass
class ProjectionProblem:
    """An action, an invariant subspace Y and an optional starting projection."""

    action: AbelianAction
    subspace: Subspace
    q0: Optional[np.ndarray] = None

    def __post_init__(self):
        validate_subspace(self.action, self.subspace)
        if self.q0 is not None:
            self.q0 = np.asarray(self.q0)
            if self.q0.shape != (self.action.dim, self.action.dim):
                raise DimensionMismatchError(
                    f"q0 has shape {self.q0.shape}, expected {(self.action.dim, self.action.dim)}"
                )

    @property
    def dtype(self) -> np.dtype:
        """Common dtype of the action, the subspace basis and q0."""
        arrays = [self.subspace.basis] + list(self.action.generators)
        if self.q0 is not None:
            arrays.append(self.q0)
        return np.result_type(*arrays)


@dataclass
class ProjectionResult:
    """A commuting projection onto Y with its bound evidence."""

    projection: np.ndarray
    pnorm: float
    m_y: float
    m_y_stabilized: bool
    lambda_y: float
    lambda_exact: bool
    commutation_residual: float
    idempotence_residual: float
    range_angle: float
    route: str
    restriction: Restriction
    exact: AffineSet
    averaging: Optional[ConvergenceReport] = None
    checks: List[Check] = field(default_factory=list)
    certified_minimal: bool = False
    refine_restarts: int = 0

    @property
    def bound(self) -> float:
        """m_Y * lambda(X, Y)."""
        return self.m_y * self.lambda_y

    @property
    def gap(self) -> float:
        """Distance from the found norm up to the m_Y lambda bound."""
        return self.bound - self.pnorm

    def to_dict(self) -> Dict[str, Any]:
        """Report payload."""
        return {
            "projection": to_nested_list(self.projection),
            "pnorm": self.pnorm,
            "mY": self.m_y,
            "mY_stabilized": self.m_y_stabilized,
            "lambdaY": self.lambda_y,
            "lambda_exact": self.lambda_exact,
            "bound": self.bound,
            "gap": self.gap,
            "commutation_residual": self.commutation_residual,
            "idempotence_residual": self.idempotence_residual,
            "range_angle": self.range_angle,
            "route": self.route,
            "certified_minimal": self.certified_minimal,
            "minimality": "certified" if self.certified_minimal else "best found",
            "fixed_set_dimension": self.exact.dimension,
            "restriction": self.restriction.to_dict(),
            "averaging": self.averaging.to_dict() if self.averaging else None,
            "checks": [c.to_dict() for c in self.checks],
        }


def _projection_rows(subspace: Subspace, dtype) -> Tuple[List[np.ndarray], List[np.ndarray]]:
    """Rows for ran P in Y and P y = y on Y, in row-major vec coordinates."""
    dim = subspace.ambient
    identity = np.eye(dim, dtype=dtype)
    basis = subspace.basis.astype(dtype)
    complement = identity - basis @ basis.conj().T
    # vec(A X B) = kron(A, B^T) vec(X) for row-major vec
    rows = [np.kron(complement, identity), np.kron(identity, basis.T)]
    rhs = [np.zeros(dim * dim, dtype=dtype), basis.reshape(-1)]
    return rows, rhs


def projection_family(subspace: Subspace, dtype=np.float64) -> AffineSet:
    """All projections onto Y as an affine set of flattened matrices."""
    rows, rhs = _projection_rows(subspace, dtype)
    return solve_affine_system(np.vstack(rows), np.concatenate(rhs))


def commuting_projection_family(action: AbelianAction, subspace: Subspace, dtype=None) -> AffineSet:
    """
    Projections onto Y that commute with every generator.

    Args:
        action: Commuting action
        subspace: Invariant subspace Y
        dtype: Working dtype (default from the action and Y)

    Returns:
        AffineSet in row-major flattened coordinates (possibly empty)
    """
    if dtype is None:
        dtype = np.result_type(subspace.basis, action.dtype)
    identity = np.eye(action.dim, dtype=dtype)
    rows, rhs = _projection_rows(subspace, dtype)
    for generator in action.generators:
        rows.append(np.kron(generator, identity) - np.kron(identity, generator.T))
        rhs.append(np.zeros(action.dim * action.dim, dtype=dtype))
    return solve_affine_system(np.vstack(rows), np.concatenate(rhs))


def relative_projection_constant(
    subspace: Subspace,
    norm: NormKind = NormKind.L2,
    config: Optional[dict] = None,
) -> Tuple[np.ndarray, float, bool]:
    """
    Estimate lambda(X, Y), the least norm of a projection onto Y.

    Exact (the orthogonal projector, value 1) for l2. For l1 and linf the
    value is the best norm found by coordinate descent from the
    orthogonal projector; it is exact only when it reaches the lower
    bound 1.

    Args:
        subspace: Y
        norm: Ambient vector norm
        config: Optional descent configuration

    Returns:
        (projection, lambda estimate, exact flag)
    """
    norm = NormKind(norm)
    orthogonal = subspace.projector()
    if norm == NormKind.L2 or subspace.dim == 0:
        return orthogonal, 1.0 if subspace.dim else 0.0, True
    family = projection_family(subspace, orthogonal.dtype)
    outcome = AffineNormMinimizer(family, orthogonal.shape, norm, config).minimize(orthogonal)
    exact = outcome.norm <= 1.0 + UNIT_NORM_TOL
    logger.debug("relative_projection_constant", norm=norm.value, value=outcome.norm, exact=exact)
    return outcome.matrix, outcome.norm, exact


def projection_residuals(action: AbelianAction, subspace: Subspace, projection: np.ndarray) -> Dict[str, float]:
    """Idempotence, commutation and range residuals of a candidate projection."""
    commutation = max(
        float(np.linalg.norm(projection @ t - t @ projection, 2)) / (1.0 + induced_norm(t))
        for t in action.generators
    )
    idempotence = float(np.linalg.norm(projection @ projection - projection, 2))
    range_angle = subspace_distance(span(projection), subspace)
    return {"commutation": commutation, "idempotence": idempotence, "range_angle": range_angle}


def projection_orbit(problem: ProjectionProblem, restriction: Restriction) -> OrbitMap:
    """P -> Y (T_g|Y)^-1 Y^* P T_g for every generator."""
    dtype = problem.dtype
    basis = problem.subspace.basis.astype(dtype)
    lifts = [basis @ inverse @ basis.conj().T for inverse in restriction.inverses]
    maps = [lambda p, lift=lift, t=t: lift @ p @ t for lift, t in zip(lifts, problem.action.generators)]
    dim = problem.action.dim
    return OrbitMap(maps, shape=(dim, dim), dtype=dtype, name="commuting_projection")


def _result_checks(
    residuals: Dict[str, float],
    pnorm: float,
    m_y: GrowthEstimate,
    lambda_y: float,
    residual_tol: float,
) -> List[Check]:
    checks = [
        Check("idempotent", residuals["idempotence"] <= residual_tol, residuals["idempotence"], residual_tol),
        Check("commutes", residuals["commutation"] <= residual_tol, residuals["commutation"], residual_tol),
        Check("range_is_Y", residuals["range_angle"] <= residual_tol, residuals["range_angle"], residual_tol),
    ]
    limit = m_y.sup * lambda_y + BOUND_SLACK
    if m_y.stabilized:
        checks.append(Check("norm_bound", pnorm <= limit, pnorm, limit))
    else:
        checks.append(Check("norm_bound", False, pnorm, None, skipped=True))
    return checks


def commuting_projection(
    problem: ProjectionProblem,
    schedule: Optional[FolnerSchedule] = None,
    depth: Optional[int] = None,
) -> ProjectionResult:
    """
    Build a projection onto Y commuting with the action.

    The averaging route runs P -> (T_g|Y)^-1 P T_g over Følner boxes from
    Q0; the exact route solves the linear constraints and takes the
    least-Frobenius-norm solution. The averaged projection is returned
    when it converges and agrees with the exact fixed set.

    Args:
        problem: Action, Y and optional Q0
        schedule: Følner schedule (default for the number of generators)
        depth: Word depth for the m_Y estimate

    Returns:
        ProjectionResult
    """
    config = get_config()
    residual_tol = config.projection.residual_tol
    route_tol = config.projection.route_tol
    action, subspace = problem.action, problem.subspace
    if schedule is None:
        schedule = FolnerSchedule.default(action.k)

    restriction = check_invariance(action, subspace)
    q0, lambda_y, lambda_exact = relative_projection_constant(subspace, action.norm)
    if problem.q0 is not None:
        q0 = problem.q0
    q0 = q0.astype(problem.dtype)

    exact = commuting_projection_family(action, subspace, problem.dtype)
    if exact.is_empty:
        raise NoCommutingProjectionError(
            "no projection onto Y commutes with the action",
            details={"residual": exact.residual},
        )
    dim = action.dim
    exact_projection = exact.particular.reshape(dim, dim)

    growth_limit = config.averaging.growth_factor * max(1.0, float(np.linalg.norm(q0)))
    averaged, report = folner_average(projection_orbit(problem, restriction), q0, schedule, growth_limit)

    route = "exact"
    projection = exact_projection
    if report.status == ConvergenceStatus.CONVERGED:
        distance = exact.distance(averaged.reshape(-1))
        averaged_residuals = projection_residuals(action, subspace, averaged)
        if distance > route_tol or averaged_residuals["commutation"] > residual_tol:
            raise RouteDisagreementError(
                "averaged projection is not in the exact commuting family",
                details={"distance": distance, "commutation": averaged_residuals["commutation"]},
            )
        projection = averaged
        route = "averaging"
    else:
        logger.info("averaging_route_abandoned", status=report.status.value, reason=report.reason)

    m_y = restricted_bound(action, subspace.basis, depth)
    residuals = projection_residuals(action, subspace, projection)
    pnorm = induced_norm(projection, action.norm)
    result = ProjectionResult(
        projection=projection,
        pnorm=pnorm,
        m_y=m_y.sup,
        m_y_stabilized=m_y.stabilized,
        lambda_y=lambda_y,
        lambda_exact=lambda_exact,
        commutation_residual=residuals["commutation"],
        idempotence_residual=residuals["idempotence"],
        range_angle=residuals["range_angle"],
        route=route,
        restriction=restriction,
        exact=exact,
        averaging=report,
        checks=_result_checks(residuals, pnorm, m_y, lambda_y, residual_tol),
        certified_minimal=exact.dimension == 0 or pnorm <= 1.0 + UNIT_NORM_TOL,
    )
    logger.info(
        "commuting_projection",
        route=route,
        pnorm=pnorm,
        mY=m_y.sup,
        mY_stabilized=m_y.stabilized,
        lambdaY=lambda_y,
    )
    return result


def minimal_projection_refine(
    problem: ProjectionProblem,
    result: ProjectionResult,
    config: Optional[dict] = None,
) -> ProjectionResult:
    """
    Lower the norm of a commuting projection inside the exact fixed set.

    Deterministic coordinate descent with seeded restarts. The result is
    an upper bound on the least norm; it is certified minimal only when
    it reaches the lower bound 1 or the fixed set is a single point.

    Args:
        problem: The projection problem
        result: Output of commuting_projection
        config: Optional descent configuration

    Returns:
        ProjectionResult with route "refined"
    """
    action, subspace = problem.action, problem.subspace
    if result.exact.dimension == 0:
        return replace(result, certified_minimal=True)

    minimizer = AffineNormMinimizer(result.exact, result.projection.shape, action.norm, config)
    outcome = minimizer.minimize(result.projection)
    residuals = projection_residuals(action, subspace, outcome.matrix)
    residual_tol = get_config().projection.residual_tol
    m_y = GrowthEstimate(sup=result.m_y, depth=0, stabilized=result.m_y_stabilized)
    logger.info("projection_refined", start_norm=outcome.start_norm, norm=outcome.norm, restart=outcome.restart)
    return replace(
        result,
        projection=outcome.matrix,
        pnorm=outcome.norm,
        commutation_residual=residuals["commutation"],
        idempotence_residual=residuals["idempotence"],
        range_angle=residuals["range_angle"],
        route="refined",
        checks=_result_checks(residuals, outcome.norm, m_y, result.lambda_y, residual_tol),
        certified_minimal=outcome.norm <= 1.0 + UNIT_NORM_TOL,
        refine_restarts=len(outcome.norms),
    )
