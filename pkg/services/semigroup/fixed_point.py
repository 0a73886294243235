"""Affine right actions of finite semigroups and fixed points from means."""

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
import scipy.linalg

from shared.exceptions import ActionLawError, DimensionMismatchError, FixedPointError, InvalidInputError
from shared.logging_setup import get_logger
from shared.utils import make_rng
from services.semigroup.mean import MeanResult
from services.semigroup.table import FiniteSemigroup

logger = get_logger(__name__)

ACTION_LAW_TOL = 1e-10
FIXED_POINT_TOL = 1e-9


@dataclass
class AffineActionOnPoints:
    """x.s = M_s x + b_s for every element s of a finite semigroup."""

    dim: int
    linear: List[np.ndarray] = field(repr=False)
    offsets: List[np.ndarray] = field(repr=False)

    def apply(self, x: np.ndarray, s: int) -> np.ndarray:
        """The point x.s."""
        return self.linear[s] @ x + self.offsets[s]

    def orbit(self, x: np.ndarray) -> np.ndarray:
        """All points x.s stacked as rows."""
        return np.stack([self.apply(x, s) for s in range(len(self.linear))])


def check_action_law(semigroup: FiniteSemigroup, action: AffineActionOnPoints) -> float:
    """
    Verify (x.s).t = x.(st) on a basis and at the origin.

    Equivalent to M_st = M_t M_s and b_st = M_t b_s + b_t.

    Args:
        semigroup: S
        action: Candidate affine action

    Returns:
        Worst relative defect found
    """
    n = semigroup.order
    if len(action.linear) != n or len(action.offsets) != n:
        raise DimensionMismatchError(
            f"action has {len(action.linear)} maps for a semigroup of order {n}"
        )
    for m_s, b_s in zip(action.linear, action.offsets):
        if m_s.shape != (action.dim, action.dim) or b_s.shape != (action.dim,):
            raise DimensionMismatchError("action map shape does not match its dimension")

    worst = 0.0
    for s in range(n):
        for t in range(n):
            st = semigroup.multiply(s, t)
            m_s, b_s = action.linear[s], action.offsets[s]
            m_t, b_t = action.linear[t], action.offsets[t]
            scale = 1.0 + np.linalg.norm(m_t, 2) * (np.linalg.norm(m_s, 2) + np.linalg.norm(b_s)) + np.linalg.norm(b_t)
            linear_defect = np.linalg.norm(m_t @ m_s - action.linear[st], 2)
            offset_defect = np.linalg.norm(m_t @ b_s + b_t - action.offsets[st])
            defect = float(max(linear_defect, offset_defect) / scale)
            worst = max(worst, defect)
            if defect > ACTION_LAW_TOL:
                raise ActionLawError(
                    f"action law fails for (s, t) = ({s}, {t})",
                    details={"witness": [s, t], "defect": defect},
                )
    return worst


def fixed_point_residual(action: AffineActionOnPoints, point: np.ndarray) -> float:
    """max over s of |a.s - a|."""
    return float(np.linalg.norm(action.orbit(point) - point[None, :], axis=1).max())


def fixed_point_from_mean(
    semigroup: FiniteSemigroup,
    mean: MeanResult,
    action: AffineActionOnPoints,
    start: np.ndarray,
) -> np.ndarray:
    """
    Average the orbit of a point against an invariant mean.

    a = sum over s of phi(s) (b.s) is fixed by every element.

    Args:
        semigroup: S
        mean: Feasible right invariant mean
        action: Affine right action of S
        start: Any point b

    Returns:
        The fixed point a

    Raises:
        FixedPointError: max_s |a.s - a| exceeds 1e-9 (1 + |a|)
    """
    if not mean.feasible or mean.weights is None:
        raise InvalidInputError("fixed point construction needs a feasible mean")
    start = np.asarray(start)
    if start.shape != (action.dim,):
        raise DimensionMismatchError(f"start point must have {action.dim} entries")
    check_action_law(semigroup, action)

    orbit = action.orbit(start)
    point = mean.weights @ orbit
    residual = fixed_point_residual(action, point)
    limit = FIXED_POINT_TOL * (1.0 + float(np.linalg.norm(point)))
    if residual > limit:
        logger.warning("fixed_point_residual_exceeded", residual=residual, limit=limit)
        raise FixedPointError(
            "averaged point is not fixed by every element",
            details={"residual": residual, "limit": limit, "mean_residual": mean.residual},
        )
    logger.info("fixed_point_from_mean", order=semigroup.order, dim=action.dim, residual=residual)
    return point


def regular_affine_action(semigroup: FiniteSemigroup, dim: int = 4, seed: int = 0) -> AffineActionOnPoints:
    """
    Right regular action on probability vectors, as an affine action on R^dim.

    The simplex sum(x) = 1 is coordinatized by x = e_0 + D y with D columns
    e_i - e_0, padded by an identity block and conjugated by a seeded
    affine bijection.

    Args:
        semigroup: S of order n with n - 1 <= dim
        dim: Ambient dimension of the result
        seed: Seed for the conjugating bijection

    Returns:
        AffineActionOnPoints satisfying the action law
    """
    n = semigroup.order
    if n - 1 > dim:
        raise InvalidInputError(f"order {n} needs dimension at least {n - 1}")

    base = np.zeros(n)
    base[0] = 1.0
    directions = np.zeros((n, n - 1))
    if n > 1:
        directions[1:, :] = np.eye(n - 1)
        directions[0, :] = -1.0
    left_inverse = np.linalg.pinv(directions) if n > 1 else np.zeros((0, n))

    rng = make_rng(seed)
    orthogonal, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    conjugator = orthogonal @ np.diag(rng.uniform(0.5, 2.0, size=dim))
    conjugator_inv = scipy.linalg.inv(conjugator)
    shift = rng.standard_normal(dim)

    linear, offsets = [], []
    for s in range(n):
        regular = np.zeros((n, n))
        regular[semigroup.right_translation(s), np.arange(n)] = 1.0
        block = np.eye(dim)
        offset = np.zeros(dim)
        block[: n - 1, : n - 1] = left_inverse @ regular @ directions
        offset[: n - 1] = left_inverse @ (regular @ base - base)
        m_s = conjugator @ block @ conjugator_inv
        b_s = conjugator @ offset - m_s @ shift + shift
        linear.append(m_s)
        offsets.append(b_s)
    return AffineActionOnPoints(dim=dim, linear=linear, offsets=offsets)
