"""Word-enumeration estimates of the uniform bounds m and M."""

from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from shared.config import get_config
from shared.exceptions import DimensionMismatchError
from shared.logging_setup import get_logger
from services.action.action import AbelianAction
from services.action.words import WordEvaluator, compositions
from services.linalg import checked_inverse, condition_number, induced_norm, lower_norm

logger = get_logger(__name__)


@dataclass
class BoundEstimate:
    """Running min of lower gains and max of operator norms over words."""

    lower: float
    upper: float
    depth: int
    lower_stabilized: bool
    upper_stabilized: bool
    singular: bool
    words: int
    lower_history: List[float] = field(default_factory=list)
    upper_history: List[float] = field(default_factory=list)

    @property
    def stabilized(self) -> bool:
        """Both bounds agree between the last two depths."""
        return self.lower_stabilized and self.upper_stabilized

    def to_dict(self) -> Dict:
        """Report payload."""
        return {
            "lower": self.lower,
            "upper": self.upper,
            "depth": self.depth,
            "stabilized": self.stabilized,
            "lower_stabilized": self.lower_stabilized,
            "upper_stabilized": self.upper_stabilized,
            "singular": self.singular,
            "words": self.words,
            "lower_history": list(self.lower_history),
            "upper_history": list(self.upper_history),
        }


def _agrees(current: float, previous: float, tol: float) -> bool:
    if current == previous:
        return True
    scale = max(abs(current), abs(previous))
    return abs(current - previous) <= tol * scale


def _stabilization(history: List[float], tol: float) -> bool:
    if len(history) < 2:
        return False
    return _agrees(history[-1], history[-2], tol)


def estimate_bounds(
    action: AbelianAction,
    depth: Optional[int] = None,
    config: Optional[Dict] = None,
) -> BoundEstimate:
    """
    Estimate m = inf and M = sup of word gains over words of length <= depth.

    Args:
        action: Commuting action
        depth: Largest word length L (default from config)
        config: Optional bounds configuration dictionary

    Returns:
        BoundEstimate with per-depth histories
    """
    if config is None:
        bounds = get_config().bounds
        config = {
            "depth": bounds.depth,
            "stabilization_tol": bounds.stabilization_tol,
            "singular_condition": bounds.singular_condition,
        }
    if depth is None:
        depth = config["depth"]
    if depth < 1:
        raise ValueError("depth must be >= 1")

    evaluator = WordEvaluator(action)
    lower, upper = np.inf, 0.0
    singular = False
    words = 0
    lower_history: List[float] = []
    upper_history: List[float] = []
    for length in range(1, depth + 1):
        for exponents in compositions(length, action.k):
            word = evaluator.evaluate(exponents)
            words += 1
            upper = max(upper, induced_norm(word, action.norm))
            if condition_number(word) > config["singular_condition"]:
                singular = True
                lower = 0.0
            else:
                lower = min(lower, lower_norm(word, action.norm))
        lower_history.append(float(lower))
        upper_history.append(float(upper))

    tol = config["stabilization_tol"]
    estimate = BoundEstimate(
        lower=float(lower),
        upper=float(upper),
        depth=depth,
        lower_stabilized=_stabilization(lower_history, tol),
        upper_stabilized=_stabilization(upper_history, tol),
        singular=singular,
        words=words,
        lower_history=lower_history,
        upper_history=upper_history,
    )
    logger.debug(
        "bounds_estimated",
        depth=depth,
        lower=estimate.lower,
        upper=estimate.upper,
        stabilized=estimate.stabilized,
        singular=singular,
    )
    return estimate


@dataclass
class GrowthEstimate:
    """sup over words of |B_w^-1| |A_w| by depth."""

    sup: float
    depth: int
    stabilized: bool
    history: List[float] = field(default_factory=list)

    def to_dict(self) -> Dict:
        """Report payload."""
        return {
            "sup": self.sup,
            "depth": self.depth,
            "stabilized": self.stabilized,
            "history": list(self.history),
        }


def intertwining_growth(
    source: AbelianAction,
    target: AbelianAction,
    depth: int = 12,
    stabilization_tol: Optional[float] = None,
) -> GrowthEstimate:
    """
    Evidence for sup over s of |B_s^-1| |A_s| < infinity.

    Args:
        source: Action A on X
        target: Action B on Y with invertible generators
        depth: Largest word length
        stabilization_tol: Relative agreement between the last two depths

    Returns:
        GrowthEstimate
    """
    if source.k != target.k:
        raise DimensionMismatchError(
            f"actions have {source.k} and {target.k} generators",
        )
    if stabilization_tol is None:
        stabilization_tol = get_config().bounds.stabilization_tol

    inverses = [checked_inverse(b, name=name) for b, name in zip(target.generators, target.names)]
    source_words = WordEvaluator(source)
    target_words = WordEvaluator(target, inverses)

    sup = 0.0
    history: List[float] = []
    for length in range(1, depth + 1):
        for exponents in compositions(length, source.k):
            a_w = source_words.evaluate(exponents)
            b_w_inv = target_words.evaluate([-a for a in exponents])
            sup = max(sup, induced_norm(b_w_inv, target.norm) * induced_norm(a_w, source.norm))
        history.append(float(sup))
    return GrowthEstimate(
        sup=float(sup),
        depth=depth,
        stabilized=_stabilization(history, stabilization_tol),
        history=history,
    )


def restricted_bound(
    action: AbelianAction,
    basis: np.ndarray,
    depth: Optional[int] = None,
    stabilization_tol: Optional[float] = None,
) -> GrowthEstimate:
    """
    Estimate m_Y = sup over words of |T_w| |(T_w restricted to Y)^-1|.

    The restriction inverse is measured as Y (T_w|Y)^-1 Y^* on the whole
    space; this is exact for l2 and an estimate for l1 and linf.

    Args:
        action: Commuting action leaving Y invariant
        basis: Orthonormal basis of Y (dim x dimY)
        depth: Largest word length
        stabilization_tol: Relative agreement between the last two depths

    Returns:
        GrowthEstimate whose sup is the m_Y estimate
    """
    bounds = get_config().bounds
    if depth is None:
        depth = bounds.depth
    if stabilization_tol is None:
        stabilization_tol = bounds.stabilization_tol

    restricted = [basis.conj().T @ g @ basis for g in action.generators]
    restricted_inverses = [checked_inverse(r, name=f"{name}|Y") for r, name in zip(restricted, action.names)]
    words = WordEvaluator(action)
    restricted_action = AbelianAction(
        dim=basis.shape[1],
        generators=restricted,
        norm=action.norm,
        names=action.names,
    )
    restricted_words = WordEvaluator(restricted_action, restricted_inverses)

    sup = 0.0
    history: List[float] = []
    for length in range(1, depth + 1):
        for exponents in compositions(length, action.k):
            t_w = words.evaluate(exponents)
            inverse_on_y = basis @ restricted_words.evaluate([-a for a in exponents]) @ basis.conj().T
            sup = max(sup, induced_norm(t_w, action.norm) * induced_norm(inverse_on_y, action.norm))
        history.append(float(sup))
    return GrowthEstimate(
        sup=float(sup),
        depth=depth,
        stabilized=_stabilization(history, stabilization_tol),
        history=history,
    )
