"""Extension of intertwining operators from an invariant subspace."""

from dataclasses import dataclass
from typing import Any, Dict, List, Optional

import numpy as np
import scipy.linalg

from shared.config import get_config
from shared.exceptions import (
    DimensionMismatchError,
    HypothesisError,
    InvarianceViolationError,
    NoIntertwinerError,
    NonInvertibleError,
    OrbitGrowthError,
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
    intertwining_growth,
)
from services.linalg import AffineSet, Subspace, condition_number, induced_norm, solve_affine_system

logger = get_logger(__name__)

GROWTH_DEPTH = 12


@dataclass
class IntertwinerProblem:
    """Actions A on X and B on Y, an A-invariant E in X and T0: E -> Y."""

    action_a: AbelianAction
    action_b: AbelianAction
    subspace: Subspace
    t0: np.ndarray

    def __post_init__(self):
        self.t0 = np.asarray(self.t0)
        if self.action_a.k != self.action_b.k:
            raise DimensionMismatchError(
                f"actions have {self.action_a.k} and {self.action_b.k} generators",
            )
        if self.subspace.ambient != self.action_a.dim:
            raise DimensionMismatchError(
                f"E lives in dimension {self.subspace.ambient}, A acts on {self.action_a.dim}",
            )
        expected = (self.action_b.dim, self.subspace.dim)
        if self.t0.shape != expected:
            raise DimensionMismatchError(f"t0 has shape {self.t0.shape}, expected {expected}")

    @property
    def dtype(self) -> np.dtype:
        """Common dtype of every matrix in the problem."""
        arrays = [self.subspace.basis, self.t0] + list(self.action_a.generators) + list(self.action_b.generators)
        return np.result_type(*arrays)


@dataclass
class IntertwinerResult:
    """An extension T with B_g T = T A_g and T|E = T0."""

    operator: np.ndarray
    route: str
    restriction_residual: float
    intertwining_residual: float
    exact: AffineSet
    exact_operator: np.ndarray
    exact_residuals: Dict[str, float]
    averaged_residuals: Optional[Dict[str, float]]
    averaging: ConvergenceReport
    growth: GrowthEstimate
    growth_exceeded: bool

    def to_dict(self) -> Dict[str, Any]:
        """Report payload."""
        return {
            "operator": to_nested_list(self.operator),
            "route": self.route,
            "restriction_residual": self.restriction_residual,
            "intertwining_residual": self.intertwining_residual,
            "fixed_set_dimension": self.exact.dimension,
            "exact_residuals": dict(self.exact_residuals),
            "averaged_residuals": dict(self.averaged_residuals) if self.averaged_residuals else None,
            "averaging": self.averaging.to_dict(),
            "growth": self.growth.to_dict(),
            "growth_exceeded": self.growth_exceeded,
        }


def _check_preconditions(problem: IntertwinerProblem, tol: float) -> List[np.ndarray]:
    """Invertible B_g, A_g(E) in E and B_g T0 = T0 A_g|E; returns the inverses of B_g."""
    max_condition = get_config().linalg.max_condition
    inverses = []
    for name, b in zip(problem.action_b.names, problem.action_b.generators):
        condition = condition_number(b)
        if not np.isfinite(condition) or condition > max_condition:
            raise NonInvertibleError(
                f"target generator {name} is not invertible",
                details={"generator": name, "condition": condition},
            )
        inverses.append(scipy.linalg.inv(b))

    basis = problem.subspace.basis.astype(problem.dtype)
    complement = np.eye(problem.action_a.dim) - basis @ basis.conj().T
    for name, a, b in zip(problem.action_a.names, problem.action_a.generators, problem.action_b.generators):
        leak = float(np.linalg.norm(complement @ a @ basis, 2)) if problem.subspace.dim else 0.0
        if leak > tol * (1.0 + induced_norm(a)):
            raise InvarianceViolationError(
                f"{name} does not map E into E",
                details={"generator": name, "residual": leak},
                hypothesis="source-invariance: A_s(E) is contained in E",
            )
        restricted = basis.conj().T @ a @ basis
        defect = float(np.linalg.norm(b @ problem.t0 - problem.t0 @ restricted, 2))
        scale = 1.0 + float(np.linalg.norm(problem.t0, 2)) * (induced_norm(b) + induced_norm(a))
        if defect > tol * scale:
            raise HypothesisError(
                f"t0 does not intertwine {name} on E",
                details={"generator": name, "residual": defect},
                hypothesis="initial-intertwiner: B_s T0 = T0 A_s|E",
            )
    return inverses


def intertwiner_residuals(problem: IntertwinerProblem, operator: np.ndarray) -> Dict[str, float]:
    """|T E - T0| and the relative max_g |B_g T - T A_g|."""
    basis = problem.subspace.basis
    restriction = float(np.linalg.norm(operator @ basis - problem.t0, 2)) if problem.subspace.dim else 0.0
    norm_t = float(np.linalg.norm(operator, 2))
    intertwining = max(
        float(np.linalg.norm(b @ operator - operator @ a, 2)) / (1.0 + norm_t * (induced_norm(a) + induced_norm(b)))
        for a, b in zip(problem.action_a.generators, problem.action_b.generators)
    )
    return {"restriction": restriction, "intertwining": intertwining}


def intertwiner_family(problem: IntertwinerProblem) -> AffineSet:
    """
    All T with T|E = T0 and B_g T = T A_g, in row-major flattened coordinates.

    Args:
        problem: Intertwiner problem

    Returns:
        AffineSet with the least-Frobenius-norm extension as particular point
    """
    dtype = problem.dtype
    p, q = problem.action_a.dim, problem.action_b.dim
    basis = problem.subspace.basis.astype(dtype)
    rows = [np.kron(np.eye(q, dtype=dtype), basis.T)]
    rhs = [problem.t0.astype(dtype).reshape(-1)]
    for a, b in zip(problem.action_a.generators, problem.action_b.generators):
        rows.append(np.kron(b, np.eye(p, dtype=dtype)) - np.kron(np.eye(q, dtype=dtype), a.T))
        rhs.append(np.zeros(q * p, dtype=dtype))
    return solve_affine_system(np.vstack(rows), np.concatenate(rhs))


def extend_intertwiner(
    problem: IntertwinerProblem,
    schedule: Optional[FolnerSchedule] = None,
    exact_fallback: bool = False,
) -> IntertwinerResult:
    """
    Extend T0 to all of X so that B_g T = T A_g for every generator.

    The averaging route runs T -> B_g^-1 T A_g over Følner boxes from
    T' = T0 E^*. When its orbit grows past growth_factor * |T'| the
    extension is refused with the observed growth, unless exact_fallback
    is set, in which case the exact route is used alone.

    Args:
        problem: Intertwiner problem
        schedule: Følner schedule (default for the number of generators)
        exact_fallback: Use the exact route instead of raising OrbitGrowthError

    Returns:
        IntertwinerResult
    """
    config = get_config()
    residual_tol = config.projection.residual_tol
    if schedule is None:
        schedule = FolnerSchedule.default(problem.action_a.k)

    inverses = _check_preconditions(problem, config.projection.invariance_tol)
    dtype = problem.dtype
    basis = problem.subspace.basis.astype(dtype)
    start = (problem.t0.astype(dtype) @ basis.conj().T).astype(dtype)

    exact = intertwiner_family(problem)
    if exact.is_empty:
        raise NoIntertwinerError(
            "no extension of t0 intertwines the actions",
            details={"residual": exact.residual},
        )
    shape = (problem.action_b.dim, problem.action_a.dim)
    exact_operator = exact.particular.reshape(shape)
    exact_residuals = intertwiner_residuals(problem, exact_operator)

    growth = intertwining_growth(problem.action_a, problem.action_b, depth=GROWTH_DEPTH)
    orbit = OrbitMap(
        [lambda t, inv=inv, a=a: inv @ t @ a for inv, a in zip(inverses, problem.action_a.generators)],
        shape=shape,
        dtype=dtype,
        name="intertwiner",
    )
    growth_limit = config.averaging.growth_factor * max(1.0, float(np.linalg.norm(start)))
    averaged, report = folner_average(orbit, start, schedule, growth_limit)
    growth_exceeded = report.status == ConvergenceStatus.DIVERGED
    if growth_exceeded and not exact_fallback:
        logger.warning("intertwiner_orbit_growth", max_orbit_norm=report.max_orbit_norm, growth=growth.sup)
        raise OrbitGrowthError(
            "averaging orbit of the initial extension is unbounded",
            details={
                "max_orbit_norm": report.max_orbit_norm,
                "growth_limit": growth_limit,
                "growth": growth.to_dict(),
            },
            hypothesis="bounded-orbit: sup |B_s^-1| |A_s| < inf",
        )

    operator, route, averaged_residuals = exact_operator, "exact", None
    if report.converged:
        averaged_residuals = intertwiner_residuals(problem, averaged)
        if max(averaged_residuals.values()) <= residual_tol:
            operator, route = averaged, "averaging"
    residuals = intertwiner_residuals(problem, operator)

    logger.info(
        "intertwiner_extended",
        route=route,
        status=report.status.value,
        restriction_residual=residuals["restriction"],
        intertwining_residual=residuals["intertwining"],
        growth=growth.sup,
    )
    return IntertwinerResult(
        operator=operator,
        route=route,
        restriction_residual=residuals["restriction"],
        intertwining_residual=residuals["intertwining"],
        exact=exact,
        exact_operator=exact_operator,
        exact_residuals=exact_residuals,
        averaged_residuals=averaged_residuals,
        averaging=report,
        growth=growth,
        growth_exceeded=growth_exceeded,
    )
