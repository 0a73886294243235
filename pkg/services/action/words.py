"""Word enumeration and cached evaluation."""

from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from shared.exceptions import DimensionMismatchError
from services.action.action import AbelianAction


def compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    """Nonnegative k-tuples summing to total, in lexicographic order (descending first entry)."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def iter_exponents(k: int, max_length: int, min_length: int = 1) -> Iterator[Tuple[int, ...]]:
    """
    Nonnegative exponent vectors by increasing total length.

    Args:
        k: Number of generators
        max_length: Largest total length
        min_length: Smallest total length

    Yields:
        Exponent tuples a with min_length <= sum(a) <= max_length
    """
    for length in range(min_length, max_length + 1):
        yield from compositions(length, k)


def signed_compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    """Integer k-tuples with sum |a_g| = total, in lexicographic order (ascending first entry)."""
    if parts == 1:
        yield from ((-total,), (total,)) if total else ((0,),)
        return
    for first in range(-total, total + 1):
        for rest in signed_compositions(total - abs(first), parts - 1):
            yield (first,) + rest


def iter_signed_exponents(k: int, max_length: int) -> Iterator[Tuple[int, ...]]:
    """
    Signed exponent vectors with 1 <= sum |a_g| <= max_length.

    Yields by increasing length, lexicographically within a length. Lazy, so a
    caller can stop after a prefix without building the whole l1 ball.
    """
    for length in range(1, max_length + 1):
        yield from signed_compositions(length, k)


def count_signed_words(k: int, max_length: int) -> int:
    """Number of signed exponent vectors with 1 <= sum |a_g| <= max_length."""
    # Points of the l1 ball of radius L in Z^k, minus the origin.
    table = np.zeros((k + 1, max_length + 1), dtype=object)
    table[0, :] = 1
    for dim in range(1, k + 1):
        for radius in range(max_length + 1):
            table[dim, radius] = table[dim - 1, radius] + 2 * sum(
                table[dim - 1, radius - a] for a in range(1, radius + 1)
            )
    return int(table[k, max_length]) - 1


class WordEvaluator:
    """Evaluates words with cached generator powers, negative exponents via inverses."""

    def __init__(self, action: AbelianAction, inverses: Optional[Sequence[np.ndarray]] = None):
        """
        Initialize the evaluator.

        Args:
            action: Commuting action
            inverses: Generator inverses, required for negative exponents
        """
        self.action = action
        self.inverses = list(inverses) if inverses is not None else None
        if self.inverses is not None and len(self.inverses) != action.k:
            raise DimensionMismatchError("one inverse per generator is required")
        self._powers: Dict[Tuple[int, int], np.ndarray] = {}

    def power(self, g: int, a: int) -> np.ndarray:
        """T_g^a (a may be negative when inverses are known)."""
        key = (g, a)
        cached = self._powers.get(key)
        if cached is not None:
            return cached
        if a == 0:
            value = np.eye(self.action.dim, dtype=self.action.dtype)
        elif a > 0:
            value = self.power(g, a - 1) @ self.action.generators[g]
        else:
            if self.inverses is None:
                raise ValueError("negative exponents need generator inverses")
            value = self.power(g, a + 1) @ self.inverses[g]
        self._powers[key] = value
        return value

    def evaluate(self, exponents: Sequence[int]) -> np.ndarray:
        """Product of T_g^a_g in generator order."""
        result: Optional[np.ndarray] = None
        for g, a in enumerate(exponents):
            if a == 0:
                continue
            factor = self.power(g, int(a))
            result = factor if result is None else result @ factor
        if result is None:
            return np.eye(self.action.dim, dtype=self.action.dtype)
        return result

    def evaluate_many(self, words: List[Tuple[int, ...]]) -> np.ndarray:
        """Stack of evaluated words, shape (len(words), dim, dim)."""
        return np.stack([self.evaluate(w) for w in words]) if words else np.zeros(
            (0, self.action.dim, self.action.dim), dtype=self.action.dtype
        )
