"""Bound propagation from a commuting semigroup to the group it generates."""

from dataclasses import dataclass
from itertools import islice
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from shared.config import get_config
from shared.exceptions import BoundViolationError, DimensionMismatchError, InvalidInputError, SandwichError
from shared.logging_setup import get_logger
from shared.utils import probe_mesh, to_nested_list
from services.action import AbelianAction, WordEvaluator, iter_signed_exponents
from services.linalg import induced_norm, lower_norm, vector_norm

logger = get_logger(__name__)

INVERSE_TOL = 1e-10
BOUND_SLACK = 1e-6
GROUP_CLOSURE_NOTE = "automatic: the group generated by a commuting semigroup is closed under division"


@dataclass
class EnlargedBoundsReport:
    """Word gains of the generated group against [m/M, M/m]."""

    m: float
    M: float
    depth: int
    words: int
    truncated: bool
    min_ratio: float
    max_ratio: float
    inverse_residual: float
    lower_limit: float
    upper_limit: float

    def to_dict(self) -> Dict[str, Any]:
        """Report payload."""
        return {
            "m": self.m,
            "M": self.M,
            "depth": self.depth,
            "words": self.words,
            "truncated": self.truncated,
            "min_ratio": self.min_ratio,
            "max_ratio": self.max_ratio,
            "inverse_residual": self.inverse_residual,
            "lower_limit": self.lower_limit,
            "upper_limit": self.upper_limit,
            "group_hypothesis": GROUP_CLOSURE_NOTE,
        }


def signed_words(k: int, depth: int, max_words: int) -> Tuple[List[Tuple[int, ...]], bool]:
    """
    Signed exponent vectors ordered by length, then lexicographically.

    Args:
        k: Number of generators
        depth: Largest total length sum |a_g|
        max_words: Cap on the number of words

    Returns:
        (words, truncated)
    """
    words = list(islice(iter_signed_exponents(k, depth), max_words + 1))
    return words[:max_words], len(words) > max_words


def _verify_inputs(action: AbelianAction, inverses: Sequence[np.ndarray], m: float, big_m: float) -> float:
    if len(inverses) != action.k:
        raise DimensionMismatchError(f"{len(inverses)} inverses for {action.k} generators")
    if not (0.0 < m <= big_m < np.inf):
        raise InvalidInputError("bounds must satisfy 0 < m <= M < inf", details={"m": m, "M": big_m})

    identity = np.eye(action.dim)
    residual = 0.0
    for name, t, inverse in zip(action.names, action.generators, inverses):
        if inverse.shape != t.shape:
            raise DimensionMismatchError(f"inverse of {name} has shape {inverse.shape}")
        residual = max(residual, float(np.linalg.norm(t @ inverse - identity, 2)))
        if residual > INVERSE_TOL:
            raise InvalidInputError(f"given inverse of {name} is not an inverse", details={"residual": residual})
        lower, upper = lower_norm(t, action.norm), induced_norm(t, action.norm)
        if lower < m - BOUND_SLACK or upper > big_m + BOUND_SLACK:
            raise SandwichError(
                f"{name} leaves the claimed interval [m, M]",
                details={"generator": name, "lower": lower, "upper": upper, "m": m, "M": big_m},
            )
    return residual


def enlarged_bounds_check(
    action: AbelianAction,
    inverses: Sequence[np.ndarray],
    m: float,
    big_m: float,
    depth: int = 12,
    config: Optional[Dict] = None,
) -> EnlargedBoundsReport:
    """
    Check m/M |u| <= |T_w u| <= M/m |u| for every signed word w.

    Args:
        action: Commuting action with invertible generators
        inverses: T_g^-1 in generator order
        m: Claimed lower gain on the semigroup
        big_m: Claimed upper gain on the semigroup
        depth: Largest word length
        config: Optional dictionary with max_words, mesh_size, mesh_seed

    Returns:
        EnlargedBoundsReport
    """
    if config is None:
        enlarge = get_config().enlarge
        config = {"max_words": enlarge.max_words, "mesh_size": enlarge.mesh_size, "mesh_seed": enlarge.mesh_seed}
    inverses = [np.asarray(inverse) for inverse in inverses]
    inverse_residual = _verify_inputs(action, inverses, m, big_m)

    words, truncated = signed_words(action.k, depth, config["max_words"])
    complex_valued = np.issubdtype(action.dtype, np.complexfloating)
    mesh = probe_mesh(action.dim, config["mesh_size"], config["mesh_seed"], complex_valued=complex_valued)
    mesh_norms = vector_norm(mesh, action.norm)
    lower_limit = m / big_m - BOUND_SLACK
    upper_limit = big_m / m + BOUND_SLACK

    evaluator = WordEvaluator(action, inverses)
    min_ratio, max_ratio = np.inf, 0.0
    for word in words:
        images = mesh @ evaluator.evaluate(word).T
        ratios = vector_norm(images, action.norm) / mesh_norms
        low, high = int(np.argmin(ratios)), int(np.argmax(ratios))
        min_ratio = min(min_ratio, float(ratios[low]))
        max_ratio = max(max_ratio, float(ratios[high]))
        if ratios[low] < lower_limit or ratios[high] > upper_limit:
            index = low if ratios[low] < lower_limit else high
            logger.warning("enlarged_bound_violated", word=list(word), ratio=float(ratios[index]))
            raise BoundViolationError(
                "a signed word leaves [m/M, M/m]",
                details={
                    "word": list(word),
                    "vector": to_nested_list(mesh[index]),
                    "ratio": float(ratios[index]),
                    "lower_limit": lower_limit,
                    "upper_limit": upper_limit,
                },
            )

    logger.info("enlarged_bounds_checked", words=len(words), truncated=truncated, min_ratio=min_ratio, max_ratio=max_ratio)
    return EnlargedBoundsReport(
        m=m,
        M=big_m,
        depth=depth,
        words=len(words),
        truncated=truncated,
        min_ratio=float(min_ratio),
        max_ratio=float(max_ratio),
        inverse_residual=inverse_residual,
        lower_limit=lower_limit,
        upper_limit=upper_limit,
    )
