"""Mean ergodic decomposition of commuting actions."""

from services.ergodic.decomposition import (
    Check,
    Decomposition,
    ergodic_decomposition,
    fixed_subspace,
    range_span,
    word_oracle,
)

__all__ = [
    "Check",
    "Decomposition",
    "ergodic_decomposition",
    "fixed_subspace",
    "range_span",
    "word_oracle",
]
