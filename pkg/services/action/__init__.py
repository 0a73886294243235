"""Commuting matrix actions, word bounds and Følner averaging."""

from services.action.action import AbelianAction, build_action, commutator_defect, word_apply
from services.action.averaging import (
    ConvergenceReport,
    ConvergenceStatus,
    FolnerSchedule,
    OrbitMap,
    box_mean,
    direct_box_mean,
    folner_average,
)
from services.action.bounds import (
    BoundEstimate,
    GrowthEstimate,
    estimate_bounds,
    intertwining_growth,
    restricted_bound,
)
from services.action.fixed_space import FixedSpace, fixed_space
from services.action.words import (
    WordEvaluator,
    compositions,
    count_signed_words,
    iter_exponents,
    iter_signed_exponents,
)

__all__ = [
    "AbelianAction",
    "BoundEstimate",
    "ConvergenceReport",
    "ConvergenceStatus",
    "FixedSpace",
    "FolnerSchedule",
    "GrowthEstimate",
    "OrbitMap",
    "WordEvaluator",
    "box_mean",
    "build_action",
    "commutator_defect",
    "compositions",
    "count_signed_words",
    "direct_box_mean",
    "estimate_bounds",
    "fixed_space",
    "folner_average",
    "intertwining_growth",
    "iter_exponents",
    "iter_signed_exponents",
    "restricted_bound",
    "word_apply",
]
