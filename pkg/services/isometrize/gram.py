"""Invariant Gram matrices and similarity to isometries."""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np
import scipy.linalg

from shared.config import get_config
from shared.exceptions import ConvergenceError, InvalidInputError, RouteDisagreementError, SandwichError
from shared.logging_setup import get_logger
from shared.utils import max_or_zero, to_nested_list
from services.action import (
    AbelianAction,
    BoundEstimate,
    ConvergenceReport,
    FolnerSchedule,
    OrbitMap,
    estimate_bounds,
    fixed_space,
    folner_average,
)
from services.ergodic import Check
from services.linalg import (
    NormKind,
    checked_inverse,
    condition_number,
    hermitian_part,
    polar_decompose,
    psd_sqrt,
)

logger = get_logger(__name__)

SPECTRUM_SLACK = 1e-6
ISOMETRY_TOL = 1e-7


def sandwich_bounds(action: AbelianAction, depth: Optional[int] = None) -> BoundEstimate:
    """
    Word bounds 0 < m <= |T_s x|/|x| <= M < inf, or SandwichError.

    A lower bound that keeps shrinking with the depth is read as m = 0, an
    upper bound that keeps growing as M = inf.

    Args:
        action: Commuting action
        depth: Word depth (default from config)

    Returns:
        Stabilized BoundEstimate
    """
    bounds = estimate_bounds(action, depth=depth)
    if bounds.singular or not bounds.lower > 0.0 or not bounds.lower_stabilized:
        logger.warning("sandwich_lower_failed", lower=bounds.lower, history=bounds.lower_history[-3:])
        raise SandwichError(
            "word gains are not bounded below",
            details={"lower": bounds.lower, "lower_history": bounds.lower_history, "singular": bounds.singular},
        )
    if not np.isfinite(bounds.upper) or not bounds.upper_stabilized:
        logger.warning("sandwich_upper_failed", upper=bounds.upper, history=bounds.upper_history[-3:])
        raise SandwichError(
            "word gains are not bounded above",
            details={"upper": bounds.upper, "upper_history": bounds.upper_history},
        )
    return bounds


def gram_orbit(action: AbelianAction) -> OrbitMap:
    """The maps B -> T_g^* B T_g on dim x dim matrices."""
    dtype = np.result_type(action.dtype, np.float64)
    return OrbitMap(
        [lambda b, t=t: t.conj().T @ b @ t for t in action.generators],
        shape=(action.dim, action.dim),
        dtype=dtype,
        name="gram",
    )


@dataclass
class GramResult:
    """Averaged solution of T_g^* B T_g = B for every generator."""

    gram: np.ndarray
    bounds: BoundEstimate
    averaging: ConvergenceReport
    residual: float
    fixed_space_distance: float
    fixed_space_dimension: int
    eigenvalues: np.ndarray

    def to_dict(self) -> Dict[str, Any]:
        """Report payload."""
        return {
            "gram": to_nested_list(self.gram),
            "residual": self.residual,
            "fixed_space_distance": self.fixed_space_distance,
            "fixed_space_dimension": self.fixed_space_dimension,
            "eigenvalues": [float(v) for v in self.eigenvalues],
            "bounds": self.bounds.to_dict(),
            "averaging": self.averaging.to_dict(),
            "seed": "identity",
        }


def invariant_gram(
    action: AbelianAction,
    schedule: Optional[FolnerSchedule] = None,
    depth: Optional[int] = None,
) -> GramResult:
    """
    Average B -> T_g^* B T_g over Følner boxes starting from I.

    Every box mean is a mean of T_s^* T_s, so the limit is Hermitian and
    sandwiched between m^2 I and M^2 I.

    Args:
        action: Commuting action with the Euclidean norm
        schedule: Følner schedule (default for the number of generators)
        depth: Word depth for the sandwich bounds

    Returns:
        GramResult
    """
    if action.norm != NormKind.L2:
        raise InvalidInputError(
            "invariant Gram matrices need the Euclidean norm",
            details={"norm": action.norm.value},
        )
    route_tol = get_config().projection.route_tol
    bounds = sandwich_bounds(action, depth)

    orbit = gram_orbit(action)
    seed = np.eye(action.dim, dtype=orbit.dtype)
    mean, report = folner_average(orbit, seed, schedule)
    if not report.converged:
        raise ConvergenceError(
            "Gram averaging did not converge",
            report=report,
            details={"status": report.status.value, "residual": report.residual},
        )
    gram = hermitian_part(mean)
    norm = float(np.linalg.norm(gram))
    residual = orbit.fixed_point_defect(gram) / (1.0 + norm)

    exact = fixed_space(orbit)
    distance = exact.distance(gram)
    if distance > route_tol * max(1.0, norm):
        raise RouteDisagreementError(
            "averaged Gram is not in the exact fixed space",
            details={"distance": distance, "fixed_space_dimension": exact.dimension},
        )
    eigenvalues = scipy.linalg.eigvalsh(gram)
    logger.info(
        "invariant_gram_computed",
        residual=residual,
        distance=distance,
        fixed_space_dimension=exact.dimension,
        min_eigenvalue=float(eigenvalues[0]),
        max_eigenvalue=float(eigenvalues[-1]),
    )
    return GramResult(
        gram=gram,
        bounds=bounds,
        averaging=report,
        residual=residual,
        fixed_space_distance=distance,
        fixed_space_dimension=exact.dimension,
        eigenvalues=eigenvalues,
    )


@dataclass
class IsometrizationResult:
    """A = B^(1/2) and the conjugated generators V_g = A T_g A^-1."""

    gram: GramResult
    root: np.ndarray
    isometries: List[np.ndarray]
    defects: List[float]
    spectrum: np.ndarray
    polar_defects: List[float]
    homomorphism_residual: float
    group_defects: Optional[List[float]]
    checks: List[Check] = field(default_factory=list)

    @property
    def lower(self) -> float:
        """m used for the spectrum check."""
        return self.gram.bounds.lower

    @property
    def upper(self) -> float:
        """M used for the spectrum check."""
        return self.gram.bounds.upper

    def to_dict(self) -> Dict[str, Any]:
        """Report payload."""
        return {
            "gram": self.gram.to_dict(),
            "A": to_nested_list(self.root),
            "V": [to_nested_list(v) for v in self.isometries],
            "defects": list(self.defects),
            "spectrum": [float(v) for v in self.spectrum],
            "bounds": {"m": self.lower, "M": self.upper},
            "polar_defects": list(self.polar_defects),
            "homomorphism_residual": self.homomorphism_residual,
            "group_defects": list(self.group_defects) if self.group_defects is not None else None,
            "checks": [c.to_dict() for c in self.checks],
        }


def _isometry_defect(matrix: np.ndarray) -> float:
    return float(np.linalg.norm(matrix.conj().T @ matrix - np.eye(matrix.shape[0]), 2))


def isometrize(
    action: AbelianAction,
    schedule: Optional[FolnerSchedule] = None,
    depth: Optional[int] = None,
) -> IsometrizationResult:
    """
    Conjugate every generator to an isometry by the root of an invariant Gram.

    Args:
        action: Commuting action with the Euclidean norm
        schedule: Følner schedule for the Gram averaging
        depth: Word depth for the sandwich bounds

    Returns:
        IsometrizationResult
    """
    config = get_config()
    gram = invariant_gram(action, schedule, depth)
    root = psd_sqrt(gram.gram)
    root_inverse = checked_inverse(root, name="Gram root")

    isometries = [root @ t @ root_inverse for t in action.generators]
    defects = [_isometry_defect(v) for v in isometries]
    spectrum = scipy.linalg.eigvalsh(root)
    polar_defects = [
        float(np.linalg.norm(polar_decompose(root @ t)[0] - v, 2))
        for t, v in zip(action.generators, isometries)
    ]

    pairs = []
    for g in range(action.k):
        for h in range(g, action.k):
            product = root @ (action.generators[g] @ action.generators[h]) @ root_inverse
            pairs.append(float(np.linalg.norm(isometries[g] @ isometries[h] - product, 2)))
    homomorphism_residual = max_or_zero(pairs)

    group_defects = None
    if all(condition_number(t) <= config.linalg.max_condition for t in action.generators):
        group_defects = [
            _isometry_defect(root @ scipy.linalg.inv(t) @ root_inverse) for t in action.generators
        ]

    lower, upper = gram.bounds.lower, gram.bounds.upper
    residual_tol = config.projection.residual_tol
    checks = [
        Check("gram_residual", gram.residual <= residual_tol, gram.residual, residual_tol),
        Check("isometry", max(defects) <= ISOMETRY_TOL, max(defects), ISOMETRY_TOL),
        Check(
            "spectrum_lower",
            float(spectrum[0]) >= lower - SPECTRUM_SLACK,
            float(spectrum[0]),
            lower - SPECTRUM_SLACK,
        ),
        Check(
            "spectrum_upper",
            float(spectrum[-1]) <= upper + SPECTRUM_SLACK,
            float(spectrum[-1]),
            upper + SPECTRUM_SLACK,
        ),
        Check("polar", max(polar_defects) <= ISOMETRY_TOL, max(polar_defects), ISOMETRY_TOL),
        Check("homomorphism", homomorphism_residual <= ISOMETRY_TOL, homomorphism_residual, ISOMETRY_TOL),
    ]
    if group_defects is not None:
        checks.append(Check("group_isometry", max(group_defects) <= ISOMETRY_TOL, max(group_defects), ISOMETRY_TOL))

    failed = [c.name for c in checks if not c.passed]
    if failed:
        logger.warning("isometrization_checks_failed", failed=failed)
    logger.info("isometrized", max_defect=max(defects), spectrum_min=float(spectrum[0]), spectrum_max=float(spectrum[-1]))
    return IsometrizationResult(
        gram=gram,
        root=root,
        isometries=isometries,
        defects=defects,
        spectrum=spectrum,
        polar_defects=polar_defects,
        homomorphism_residual=homomorphism_residual,
        group_defects=group_defects,
        checks=checks,
    )
