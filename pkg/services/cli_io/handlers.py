"""Subcommand handlers: problem model in, report payload and residual trace out."""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Tuple

import numpy as np

from shared.exceptions import InvalidInputError
from shared.logging_setup import get_logger
from shared.utils import to_nested_list
from services.action import AbelianAction, build_action, estimate_bounds
from services.cli_io.schemas import (
    ActionProblem,
    ActionSpec,
    DecomposeProblem,
    EnlargeProblemFile,
    FixedPointProblem,
    IntertwineProblemFile,
    IsometrizeProblemFile,
    MeanProblem,
    ProjectionProblemFile,
    RenormProblemFile,
    SemigroupProblem,
    SubspaceSpec,
    matrix_array,
)
from services.ergodic import ergodic_decomposition
from services.intertwine import IntertwinerProblem, extend_intertwiner
from services.isometrize import RenormKind, enlarged_bounds_check, invariant_norm, isometrize
from services.linalg import NormKind, Subspace, span
from services.projection import ProjectionProblem, commuting_projection, minimal_projection_refine
from services.semigroup import (
    AffineActionOnPoints,
    FiniteSemigroup,
    MeanResult,
    fixed_point_from_mean,
    fixed_point_residual,
    identity_element,
    is_commutative,
    is_group,
    right_invariant_mean,
    unitize,
    validate_table,
)

logger = get_logger(__name__)

History = List[Tuple[int, float]]


@dataclass
class CommandOutcome:
    """Report payload and the residual history for --trace."""

    payload: Dict[str, Any]
    history: History = field(default_factory=list)


def load_action(spec: ActionSpec) -> AbelianAction:
    """Validated action from its file description."""
    names = [g.name or f"g{i + 1}" for i, g in enumerate(spec.generators)]
    return build_action([matrix_array(g.matrix) for g in spec.generators], norm=NormKind(spec.norm), names=names)


def load_subspace(spec: SubspaceSpec, ambient: int) -> Subspace:
    """Orthonormalized span of the given basis columns."""
    basis = matrix_array(spec.basis)
    if basis.size == 0:
        return Subspace.zero(ambient)
    if basis.shape[0] != ambient:
        raise InvalidInputError(
            f"subspace basis has {basis.shape[0]} rows, expected {ambient}",
            details={"rows": basis.shape[0], "ambient": ambient},
        )
    return span(basis)


def _mean_payload(result: MeanResult) -> Dict[str, Any]:
    payload: Dict[str, Any] = {
        "status": result.status.value,
        "residual": result.residual,
        "pivots": result.pivots,
    }
    if result.feasible:
        payload["weights"] = [float(w) for w in result.weights]
    else:
        payload["certificate"] = [float(c) for c in result.certificate]
        payload["margin"] = result.margin
    return payload


def _semigroup(problem) -> FiniteSemigroup:
    return validate_table(problem.table)


def run_check_amenable(problem: SemigroupProblem) -> CommandOutcome:
    """Amenability verdict with the unitization cross-check."""
    semigroup = _semigroup(problem)
    result = right_invariant_mean(semigroup)
    unitized = right_invariant_mean(unitize(semigroup))
    identity = identity_element(semigroup)
    payload = {
        "kind": "amenability-report",
        "order": semigroup.order,
        "amenable": result.feasible,
        "is_group": is_group(semigroup),
        "is_commutative": is_commutative(semigroup),
        "identity": identity,
        "unitization_status": unitized.status.value,
        "mean": _mean_payload(result),
    }
    return CommandOutcome(payload)


def run_mean(problem: MeanProblem) -> CommandOutcome:
    """Right invariant mean or its certificate."""
    semigroup = _semigroup(problem)
    payload = {"kind": "mean-report", "order": semigroup.order}
    payload.update(_mean_payload(right_invariant_mean(semigroup)))
    return CommandOutcome(payload)


def run_fixed_point(problem: FixedPointProblem) -> CommandOutcome:
    """Fixed point of an affine action averaged against the invariant mean."""
    semigroup = _semigroup(problem)
    mean = right_invariant_mean(semigroup)
    action = AffineActionOnPoints(
        dim=problem.dim,
        linear=[matrix_array(m.linear) for m in problem.maps],
        offsets=[np.asarray(m.offset, dtype=float) for m in problem.maps],
    )
    for index, (linear, offset) in enumerate(zip(action.linear, action.offsets)):
        if np.iscomplexobj(linear):
            raise InvalidInputError(f"map {index} must be real", details={"map": index})
        if linear.shape != (problem.dim, problem.dim) or offset.shape != (problem.dim,):
            raise InvalidInputError(f"map {index} does not act on R^{problem.dim}", details={"map": index})
    point = fixed_point_from_mean(semigroup, mean, action, np.asarray(problem.start, dtype=float))
    payload = {
        "kind": "fixed-point-report",
        "point": to_nested_list(point),
        "residual": fixed_point_residual(action, point),
        "mean": _mean_payload(mean),
    }
    return CommandOutcome(payload)


def run_bounds(problem: ActionProblem) -> CommandOutcome:
    """Word bound estimates of an action."""
    action = load_action(problem)
    estimate = estimate_bounds(action, depth=problem.depth)
    payload = {"kind": "bounds-report", "dim": action.dim, "generators": action.names}
    payload.update(estimate.to_dict())
    return CommandOutcome(payload)


def run_decompose(problem: DecomposeProblem) -> CommandOutcome:
    """Fixed-space / range decomposition."""
    decomposition = ergodic_decomposition(load_action(problem.action))
    payload = {"kind": "decomposition-report"}
    payload.update(decomposition.to_dict())
    history = list(decomposition.averaging.history) if decomposition.averaging else []
    return CommandOutcome(payload, history)


def run_commuting_projection(problem: ProjectionProblemFile, refine: bool = False) -> CommandOutcome:
    """Commuting projection onto an invariant subspace, optionally refined toward minimal norm."""
    action = load_action(problem.action)
    q0 = matrix_array(problem.q0) if problem.q0 is not None else None
    projection_problem = ProjectionProblem(action, load_subspace(problem.subspace, action.dim), q0=q0)
    result = commuting_projection(projection_problem)
    if refine:
        result = minimal_projection_refine(projection_problem, result)
    payload = {"kind": "projection-report"}
    payload.update(result.to_dict())
    history = list(result.averaging.history) if result.averaging else []
    return CommandOutcome(payload, history)


def run_intertwine(problem: IntertwineProblemFile, exact_fallback: bool = False) -> CommandOutcome:
    """Intertwining extension of T0."""
    action_a = load_action(problem.action_a)
    action_b = load_action(problem.action_b)
    subspace = load_subspace(problem.subspace_e, action_a.dim)
    if subspace.dim == 0:
        t0 = np.zeros((action_b.dim, 0))
    else:
        # T0 acts on coordinates of the supplied basis; rewrite it on the orthonormal one.
        supplied = matrix_array(problem.subspace_e.basis)
        t0 = matrix_array(problem.t0)
        if t0.ndim != 2 or t0.shape[1] != supplied.shape[1]:
            raise InvalidInputError(
                f"t0 must have one column per basis vector of E ({supplied.shape[1]})",
                details={"shape": list(t0.shape)},
            )
        t0 = t0 @ np.linalg.pinv(subspace.basis.conj().T @ supplied)
    result = extend_intertwiner(IntertwinerProblem(action_a, action_b, subspace, t0), exact_fallback=exact_fallback)
    payload = {"kind": "intertwine-report"}
    payload.update(result.to_dict())
    return CommandOutcome(payload, list(result.averaging.history))


def run_isometrize(problem: IsometrizeProblemFile) -> CommandOutcome:
    """Invariant Gram and the conjugated isometries."""
    result = isometrize(load_action(problem.action))
    payload = {"kind": "isometrize-report"}
    payload.update(result.to_dict())
    return CommandOutcome(payload, list(result.gram.averaging.history))


def run_renorm(problem: RenormProblemFile) -> CommandOutcome:
    """Invariant equivalent norm evaluated on the probes and the mesh."""
    action = load_action(problem.action)
    probes = matrix_array(problem.probes) if problem.probes else None
    if probes is not None and probes.shape[1] != action.dim:
        raise InvalidInputError(f"probes must have {action.dim} entries", details={"columns": probes.shape[1]})
    result = invariant_norm(action, RenormKind(problem.norm_kind), probes=probes)
    payload = {"kind": "renorm-report", "probes": len(probes) if probes is not None else 0}
    payload.update(result.to_dict())
    if result.gram is not None:
        history = list(result.gram.averaging.history)
    else:
        history = [(int(side), change) for side, change in result.history]
    return CommandOutcome(payload, history)


def run_enlarge_check(problem: EnlargeProblemFile) -> CommandOutcome:
    """Signed word bounds on the generated group."""
    action = load_action(problem.action)
    inverses = [matrix_array(m) for m in problem.inverses]
    report = enlarged_bounds_check(action, inverses, problem.m, problem.big_m, depth=problem.depth)
    payload = {"kind": "enlarge-report"}
    payload.update(report.to_dict())
    return CommandOutcome(payload)


def expect_kind(problem, allowed: Tuple[str, ...]) -> None:
    """Refuse a problem file of the wrong kind for the subcommand."""
    if problem.kind not in allowed:
        raise InvalidInputError(
            f"problem kind {problem.kind!r} does not fit this command",
            details={"kind": problem.kind, "expected": list(allowed)},
        )
