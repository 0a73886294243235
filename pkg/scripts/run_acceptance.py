"""
Script to run the acceptance corpora end to end.

This script:
1. Builds the deterministic semigroup and action corpora
2. Runs every construction on them and measures the worst residual
3. Prints a summary table and saves it as CSV
"""

import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable, List, Tuple

sys.path.insert(0, str(Path(__file__).parent.parent))

import numpy as np
import pandas as pd

from shared.config import get_config
from shared.exceptions import BoundViolationError, NonInvertibleError, SingularRestrictionError
from shared.logging_setup import get_logger, setup_logging
from shared.utils import make_rng
from services.action import AbelianAction, build_action, estimate_bounds
from services.action.corpus import (
    commuting_normal_contractions,
    commuting_unitary_similar,
    isometric_on_subspace,
    jordan_shift,
    similar_rotation,
    unitary_plus_dilation,
)
from services.cli_io import parse_problem, render_report
from services.cli_io.handlers import run_check_amenable, run_decompose, run_intertwine, run_isometrize, run_renorm
from services.ergodic import ergodic_decomposition, fixed_subspace, range_span, word_oracle
from services.intertwine import IntertwinerProblem, extend_intertwiner
from services.isometrize import RenormKind, enlarged_bounds_check, invariant_norm, isometrize
from services.linalg import Subspace, orthogonal_projector, principal_angles, subspace_distance
from services.projection import ProjectionProblem, commuting_projection, projection_residuals
from services.semigroup import (
    direct_product,
    fixed_point_from_mean,
    fixed_point_residual,
    hom_image,
    identity_element,
    invariance_residual,
    product_mean,
    pushforward_mean,
    regular_affine_action,
    right_invariant_mean,
    unitize,
)
from services.semigroup.table import FiniteSemigroup
from services.semigroup.corpus import all_tables, group_corpus, homomorphisms, left_zero, random_semigroups, right_zero

logger = get_logger(__name__)

RESULTS_DIR = Path(__file__).parent.parent / "acceptance_results"
FIXED_POINT_ACTIONS = 10
PRODUCT_FACTORS = 12

Measurement = Tuple[float, float]


@dataclass
class CriterionOutcome:
    """Worst observed value of one criterion, as a fraction of its limit."""

    criterion: str
    cases: int
    worst_ratio: float
    passed: bool
    detail: str = ""
    seconds: float = 0.0


def _outcome(criterion: str, checks: List[Measurement], detail: str = "") -> CriterionOutcome:
    ratios = [value / limit if limit > 0 else (0.0 if value <= 0 else np.inf) for value, limit in checks]
    worst = max(ratios, default=0.0)
    return CriterionOutcome(criterion, len(checks), float(worst), bool(worst <= 1.0), detail)


def semigroup_corpus() -> List[FiniteSemigroup]:
    return all_tables(3) + random_semigroups(200, max_order=5)


def similar_corpus() -> List[AbelianAction]:
    return [build_action([similar_rotation()])] + [action for action, _ in commuting_unitary_similar(20)]


def failed(condition: bool) -> Measurement:
    return (float(condition), 0.0)


def group_means() -> CriterionOutcome:
    """Groups of order <= 6 get the uniform mean."""
    checks = []
    for group in group_corpus():
        result = right_invariant_mean(group)
        error = float(np.abs(result.weights - 1.0 / group.order).max()) if result.feasible else np.inf
        checks.append((error, 1e-9))
    return _outcome("group-means", checks)


def zero_semigroups() -> CriterionOutcome:
    """Right-zero has a verified certificate; left-zero has a mean."""
    right = right_invariant_mean(right_zero(2))
    left = right_invariant_mean(left_zero(2))
    return _outcome("zero-semigroups", [failed(right.feasible or right.margin is None), failed(not left.feasible)])


def closure_laws() -> CriterionOutcome:
    """Unitization both ways, homomorphic images forward and products of unital semigroups."""
    checks = []
    unital = []
    for semigroup in semigroup_corpus():
        result = right_invariant_mean(semigroup)
        checks.append(failed(result.status != right_invariant_mean(unitize(semigroup)).status))
        if not result.feasible:
            continue
        max_image = semigroup.order if semigroup.order <= 3 else 2
        for mapping in homomorphisms(semigroup, max_image=max_image):
            pushed = pushforward_mean(semigroup, mapping, result.weights)
            checks.append((invariance_residual(hom_image(semigroup, mapping), pushed), 1e-9))
        if identity_element(semigroup) is not None and len(unital) < PRODUCT_FACTORS:
            unital.append((semigroup, result.weights))
    for first, first_weights in unital:
        for second, second_weights in unital:
            weights = product_mean(first_weights, second_weights)
            checks.append((invariance_residual(direct_product(first, second), weights), 1e-9))
    return _outcome("closure-laws", checks)


def affine_fixed_points() -> CriterionOutcome:
    """Means of orbits are fixed by every element."""
    rng = make_rng(4)
    checks = []
    for semigroup in semigroup_corpus():
        mean = right_invariant_mean(semigroup)
        if not mean.feasible:
            continue
        for seed in range(FIXED_POINT_ACTIONS):
            action = regular_affine_action(semigroup, dim=4, seed=seed)
            point = fixed_point_from_mean(semigroup, mean, action, rng.normal(size=4))
            checks.append((fixed_point_residual(action, point), 1e-9 * (1.0 + float(np.linalg.norm(point)))))
    return _outcome("affine-fixed-points", checks)


def ergodic_corpus() -> CriterionOutcome:
    """Direct sum, projection norm, route agreement and word oracles on normal contractions."""
    checks = []
    for action in commuting_normal_contractions(50):
        result = ergodic_decomposition(action)
        checks.append(failed(result.fixed.dim + result.range.dim != action.dim))
        if result.fixed.dim and result.range.dim:
            checks.append(failed(principal_angles(result.fixed, result.range)[0] <= 1e-6))
        checks.append((result.pnorm, 1.0 + 1e-8))
        checks.append(failed(not all(c.passed for c in result.checks)))
        fixed, ranges = word_oracle(action, max_length=6)
        checks.append((subspace_distance(fixed, fixed_subspace(action)), 1e-8))
        checks.append((subspace_distance(ranges, range_span(action)), 1e-8))
    return _outcome("ergodic-decomposition", checks)


def commuting_projections() -> CriterionOutcome:
    """U (+) 2I on its unitary block; orthogonal projections for norm-one isometric restrictions."""
    action, y = unitary_plus_dilation()
    result = commuting_projection(ProjectionProblem(action, y))
    checks = [(value, 1e-8) for value in projection_residuals(action, y, result.projection).values()]
    detail = ""
    if result.m_y_stabilized:
        checks.append((result.pnorm, result.m_y + 1e-6))
    else:
        detail = f"|P| <= m_Y skipped: m_Y not stabilized (reached {result.m_y:.3g} at the depth cap)"
    for action, subspace in isometric_on_subspace(20):
        projector = orthogonal_projector(subspace)
        checks.extend((float(np.linalg.norm(projector @ t - t @ projector, 2)), 1e-9) for t in action.generators)
    return _outcome("commuting-projection", checks, detail)


def nilpotent_counterexample() -> CriterionOutcome:
    """The shift on its own range fails the restriction hypothesis with exit code 2."""
    action = build_action([jordan_shift(4)])
    try:
        commuting_projection(ProjectionProblem(action, Subspace(4, np.eye(4)[:, :3])))
    except SingularRestrictionError as e:
        named = "T_s(Y) = Y and the restriction" in e.hypothesis
        return _outcome("nilpotent-counterexample", [failed(not named or e.exit_code != 2)])
    return _outcome("nilpotent-counterexample", [failed(True)])


def diagonal_intertwiner() -> CriterionOutcome:
    """Both routes extend T0 = (1) to (1, 0); a zero target is refused."""
    problem = IntertwinerProblem(
        build_action([np.diag([1.0, 0.5])]),
        build_action([np.eye(1)]),
        Subspace(2, np.eye(2)[:, :1]),
        np.eye(1),
    )
    result = extend_intertwiner(problem)
    expected = np.array([[1.0, 0.0]])
    checks = [
        (float(np.abs(result.operator - expected).max()), 1e-8),
        (float(np.abs(result.exact_operator - expected).max()), 1e-8),
        failed(result.averaged_residuals is None),
    ]
    checks.extend((value, 1e-8) for value in result.exact_residuals.values())
    checks.extend((value, 1e-8) for value in (result.averaged_residuals or {}).values())
    singular = IntertwinerProblem(problem.action_a, build_action([np.zeros((1, 1))]), problem.subspace, np.eye(1))
    try:
        extend_intertwiner(singular)
        checks.append(failed(True))
    except NonInvertibleError as e:
        checks.append(failed(e.exit_code != 2))
    return _outcome("diagonal-intertwiner", checks)


def isometrization() -> CriterionOutcome:
    """Isometry defects, spectrum of the Gram root, Gram residual and oracle distance."""
    checks = []
    for action in similar_corpus():
        result = isometrize(action)
        checks.extend((defect, 1e-7) for defect in result.defects)
        checks.append(failed(float(min(result.spectrum)) < result.lower - 1e-6))
        checks.append(failed(float(max(result.spectrum)) > result.upper + 1e-6))
        checks.append((result.gram.residual, 1e-8))
        checks.append((result.gram.fixed_space_distance, 1e-7))
    return _outcome("isometrization", checks)


def invariant_norms() -> CriterionOutcome:
    """Hilbertian defect and sandwich on the probe mesh; averaged defect."""
    checks = []
    for action in similar_corpus():
        hilbertian = invariant_norm(action, RenormKind.HILBERTIAN)
        checks.append((hilbertian.defect, 1e-8))
        checks.append((hilbertian.sandwich_violation, 1e-8))
        checks.append((invariant_norm(action, RenormKind.AVERAGED).defect, 1e-6))
    return _outcome("invariant-norms", checks)


def enlarged_bounds() -> CriterionOutcome:
    """Signed words keep the enlarged interval; diag(2, 2) yields a witness."""
    checks = []
    for action in similar_corpus():
        bounds = estimate_bounds(action)
        inverses = [np.linalg.inv(t) for t in action.generators]
        report = enlarged_bounds_check(action, inverses, bounds.lower, bounds.upper, depth=12)
        checks.append(failed(report.truncated))
    try:
        enlarged_bounds_check(build_action([2.0 * np.eye(2)]), [0.5 * np.eye(2)], 2.0, 2.0, depth=12)
        checks.append(failed(True))
    except BoundViolationError as e:
        checks.append(failed("word" not in e.details))
    return _outcome("enlarged-bounds", checks)


DETERMINISM_PROBLEMS: List[Tuple[Callable, str]] = [
    (run_check_amenable, '{"kind": "semigroup", "order": 2, "table": [[0, 1], [1, 0]]}'),
    (run_decompose, '{"kind": "decompose", "action": {"dim": 2, "generators": [{"matrix": [[1, 0], [0, 0.5]]}]}}'),
    (
        run_intertwine,
        '{"kind": "intertwine", "actionA": {"dim": 2, "generators": [{"matrix": [[1, 0], [0, 0.5]]}]}, '
        '"actionB": {"dim": 1, "generators": [{"matrix": [[1]]}]}, "subspaceE": {"basis": [[1], [0]]}, "t0": [[1]]}',
    ),
    (run_isometrize, '{"kind": "isometrize", "action": {"dim": 2, "generators": [{"matrix": [[0.5, -2], [0.375, 0.5]]}]}}'),
    (
        run_renorm,
        '{"kind": "renorm", "norm-kind": "averaged", '
        '"action": {"dim": 2, "generators": [{"matrix": [[0, -1], [1, 0]]}]}}',
    ),
]


def determinism() -> CriterionOutcome:
    """Identical inputs render to identical bytes."""
    checks = []
    for handler, text in DETERMINISM_PROBLEMS:
        first = render_report(handler(parse_problem(text)).payload)
        second = render_report(handler(parse_problem(text)).payload)
        checks.append(failed(first != second))
    return _outcome("determinism", checks)


CRITERIA: List[Callable[[], CriterionOutcome]] = [
    group_means,
    zero_semigroups,
    closure_laws,
    affine_fixed_points,
    ergodic_corpus,
    commuting_projections,
    nilpotent_counterexample,
    diagonal_intertwiner,
    isometrization,
    invariant_norms,
    enlarged_bounds,
    determinism,
]


def run_criterion(criterion: Callable[[], CriterionOutcome]) -> CriterionOutcome:
    """Run one criterion and time it."""
    started = time.perf_counter()
    outcome = criterion()
    outcome.seconds = time.perf_counter() - started
    logger.info("criterion_finished", **asdict(outcome))
    return outcome


def main():
    """Main execution function."""
    setup_logging()
    config = get_config()
    print("\n" + "=" * 80)
    print("ACCEPTANCE CORPORA")
    print("=" * 80)
    print(f"rank tolerance {config.linalg.rank_rtol:g}, environment {config.environment}")

    outcomes = [run_criterion(criterion) for criterion in CRITERIA]
    summary = pd.DataFrame([asdict(o) for o in outcomes])
    print(summary.to_string(index=False))

    RESULTS_DIR.mkdir(parents=True, exist_ok=True)
    summary.to_csv(RESULTS_DIR / "acceptance_summary.csv", index=False)
    print(f"\n[OK] Results saved to {RESULTS_DIR}")

    failures = summary[~summary["passed"]]
    if len(failures):
        print(f"\n{len(failures)} criteria failed: {', '.join(failures['criterion'])}")
        sys.exit(1)
    logger.info("acceptance_complete", criteria=len(outcomes))


if __name__ == "__main__":
    main()
