"""Equivalent norms invariant under a commuting action."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from shared.config import get_config
from shared.exceptions import ConvergenceError
from shared.logging_setup import get_logger
from shared.utils import probe_mesh, to_nested_list
from services.action import AbelianAction, BoundEstimate, FolnerSchedule
from services.isometrize.gram import GramResult, invariant_gram, sandwich_bounds
from services.linalg import NormKind, vector_norm

logger = get_logger(__name__)

SANDWICH_SLACK = 1e-6


class RenormKind(str, Enum):
    """How the invariant norm is realized."""

    AVERAGED = "averaged"
    HILBERTIAN = "hilbertian"


def box_norm_mean(
    action: AbelianAction,
    vectors: np.ndarray,
    start: int,
    side: int,
) -> np.ndarray:
    """
    Mean of |T_s x| over the box {start..start+side-1}^k, one value per row x.

    Args:
        action: Commuting action; its norm measures the orbit
        vectors: Array of shape (count, dim)
        start: Smallest exponent in the box
        side: Box side

    Returns:
        Array of shape (count,)
    """
    count = vectors.shape[0]
    current = np.asarray(vectors, dtype=np.result_type(vectors, action.dtype))
    *outer, last = [t.T for t in action.generators]
    for step in outer:
        value = current @ np.linalg.matrix_power(step, start)
        orbit = []
        for _ in range(side):
            orbit.append(value)
            value = value @ step
        current = np.stack(orbit, axis=1).reshape(-1, action.dim)

    # The last generator is summed on the fly.
    value = current @ np.linalg.matrix_power(last, start)
    total = np.zeros(current.shape[0])
    for _ in range(side):
        total += vector_norm(value, action.norm)
        value = value @ last
    return total.reshape(count, -1).mean(axis=1) / side


@dataclass
class InvariantNormResult:
    """An invariant norm |x|_* with m|x| <= |x|_* <= M|x|."""

    kind: RenormKind
    action: AbelianAction
    bounds: BoundEstimate
    probes: np.ndarray
    values: np.ndarray
    defect: float
    sandwich_violation: float
    side: Optional[int] = None
    start: Optional[int] = None
    gram: Optional[GramResult] = None
    history: List[List[float]] = field(default_factory=list)

    @property
    def base_norm(self) -> NormKind:
        """Norm of the underlying space."""
        return self.action.norm

    def evaluate(self, vectors: np.ndarray) -> np.ndarray:
        """
        |x|_* for each row of vectors (a single vector gives a scalar).

        Args:
            vectors: Array of shape (dim,) or (count, dim)

        Returns:
            Invariant norms
        """
        vectors = np.asarray(vectors)
        single = vectors.ndim == 1
        rows = np.atleast_2d(vectors)
        if self.kind == RenormKind.HILBERTIAN:
            quadratic = np.einsum("ij,jk,ik->i", rows.conj(), self.gram.gram, rows).real
            values = np.sqrt(np.clip(quadratic, 0.0, None))
        else:
            values = box_norm_mean(self.action, rows, self.start, self.side)
        return float(values[0]) if single else values

    def semi_inner_product(self, x: np.ndarray, y: np.ndarray) -> complex:
        """[x, y] = <B x, y> for the hilbertian kind."""
        if self.kind != RenormKind.HILBERTIAN:
            raise ValueError("only the hilbertian invariant norm has an inner product")
        return complex(np.vdot(np.asarray(y), self.gram.gram @ np.asarray(x)))

    def to_dict(self) -> Dict[str, Any]:
        """Report payload."""
        payload = {
            "norm_kind": self.kind.value,
            "base_norm": self.base_norm.value,
            "m": self.bounds.lower,
            "M": self.bounds.upper,
            "values": [float(v) for v in self.values],
            "defect": self.defect,
            "sandwich_violation": self.sandwich_violation,
        }
        if self.kind == RenormKind.HILBERTIAN:
            payload["gram"] = to_nested_list(self.gram.gram)
        else:
            payload["side"] = self.side
            payload["history"] = [list(row) for row in self.history]
        return payload


def _averaged_side(
    action: AbelianAction,
    vectors: np.ndarray,
    schedule: FolnerSchedule,
    max_side: int,
) -> Tuple[int, int, np.ndarray, List[List[float]]]:
    """First box side at which every scalar orbit mean stops moving."""
    previous = None
    history = []
    for side in [n for n in schedule.sides if n <= max_side] or [min(schedule.sides[0], max_side)]:
        start = schedule.first_exponent(side)
        values = box_norm_mean(action, vectors, start, side)
        if previous is None:
            change = np.zeros_like(values)
        else:
            change = np.abs(values - previous) / (1.0 + values)
        history.append([side, float(change.max())])
        logger.debug("renorm_box", side=side, change=float(change.max()))
        if previous is not None and change.max() <= schedule.rel_tol:
            return side, start, values, history
        previous = values
    pending = np.flatnonzero(change > schedule.rel_tol).tolist()
    raise ConvergenceError(
        "scalar orbit means did not converge",
        details={"probes": pending, "history": history},
    )


def invariant_norm(
    action: AbelianAction,
    kind: RenormKind = RenormKind.AVERAGED,
    probes: Optional[np.ndarray] = None,
    schedule: Optional[FolnerSchedule] = None,
    depth: Optional[int] = None,
) -> InvariantNormResult:
    """
    Build an equivalent norm with |T_g x|_* = |x|_*.

    The averaged kind is the Følner box mean of s -> |T_s x|; the
    hilbertian kind is sqrt<Bx, x> for an invariant Gram B.

    Args:
        action: Commuting action
        kind: averaged or hilbertian
        probes: Extra probe vectors (rows); the configured mesh is always added
        schedule: Følner schedule
        depth: Word depth for the sandwich bounds

    Returns:
        InvariantNormResult evaluated on the probes followed by the mesh
    """
    kind = RenormKind(kind)
    config = get_config().renorm
    if schedule is None:
        schedule = FolnerSchedule.default(action.k)
    complex_valued = np.issubdtype(action.dtype, np.complexfloating)
    mesh = probe_mesh(action.dim, config.mesh_size, config.mesh_seed, complex_valued=complex_valued)
    if probes is not None and len(probes):
        vectors = np.vstack([np.atleast_2d(np.asarray(probes)), mesh])
    else:
        vectors = mesh

    if kind == RenormKind.HILBERTIAN:
        gram = invariant_gram(action, schedule, depth)
        result = InvariantNormResult(
            kind=kind, action=action, bounds=gram.bounds, probes=vectors, values=np.empty(0), defect=0.0,
            sandwich_violation=0.0, gram=gram,
        )
    else:
        bounds = sandwich_bounds(action, depth)
        side, start, _, history = _averaged_side(action, vectors, schedule, config.scalar_max_side)
        result = InvariantNormResult(
            kind=kind, action=action, bounds=bounds, probes=vectors, values=np.empty(0), defect=0.0,
            sandwich_violation=0.0, side=side, start=start, history=history,
        )

    values = result.evaluate(vectors)
    base = vector_norm(vectors, action.norm)
    # zero rows have no relative defect
    nonzero = base > 0
    defect = 0.0
    for t in action.generators:
        moved = result.evaluate(vectors[nonzero] @ t.T)
        relative = np.abs(moved - values[nonzero]) / values[nonzero]
        defect = max(defect, float(relative.max(initial=0.0)))
    lower, upper = result.bounds.lower, result.bounds.upper
    violation = float(
        max(
            (lower * base - values).max() / base.max(),
            (values - upper * base).max() / base.max(),
            0.0,
        )
    )
    result.values = values
    result.defect = defect
    result.sandwich_violation = violation
    if violation > SANDWICH_SLACK:
        logger.warning("renorm_sandwich_violated", violation=violation, kind=kind.value)
    logger.info("invariant_norm_built", kind=kind.value, defect=defect, side=result.side, probes=len(values))
    return result
