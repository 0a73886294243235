"""Finite semigroups given by multiplication tables."""

from dataclasses import dataclass, field
from typing import Any, List, Optional

import numpy as np

from shared.exceptions import AssociativityError, InvalidInputError
from shared.logging_setup import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class FiniteSemigroup:
    """
    Semigroup on indices 0..n-1.

    table[i, j] is the index of s_i * s_j.
    """

    table: np.ndarray = field(repr=False)
    name: Optional[str] = None

    def __post_init__(self):
        table = np.array(self.table, dtype=np.int64)
        table.setflags(write=False)
        object.__setattr__(self, "table", table)

    @property
    def order(self) -> int:
        """Number of elements."""
        return int(self.table.shape[0])

    def multiply(self, i: int, j: int) -> int:
        """Index of s_i * s_j."""
        return int(self.table[i, j])

    def right_translation(self, s: int) -> np.ndarray:
        """The map t -> t * s as an index array."""
        return self.table[:, s]

    def to_list(self) -> List[List[int]]:
        """Table as nested lists."""
        return self.table.tolist()


def associativity_witness(table: np.ndarray) -> Optional[tuple]:
    """
    First triple (i, j, k) in lexicographic order with (ij)k != i(jk).

    Args:
        table: Square integer table with entries in range

    Returns:
        Witness triple or None when associative
    """
    n = table.shape[0]
    left = table[table]  # left[i, j, k] = table[table[i, j], k]
    right = table[np.arange(n)[:, None, None], table[None, :, :]]
    mismatches = np.argwhere(left != right)
    if mismatches.size == 0:
        return None
    return tuple(int(v) for v in mismatches[0])


def validate_table(raw: Any, name: Optional[str] = None) -> FiniteSemigroup:
    """
    Validate a raw multiplication table.

    Args:
        raw: Square nested sequence of integers in 0..n-1
        name: Optional label

    Returns:
        FiniteSemigroup
    """
    try:
        table = np.asarray(raw)
    except ValueError as e:
        raise InvalidInputError(f"table is not rectangular: {e}") from e

    if table.ndim != 2 or table.shape[0] != table.shape[1] or table.shape[0] == 0:
        raise InvalidInputError(
            "table must be a nonempty square array",
            details={"shape": list(table.shape)},
        )
    if not np.issubdtype(table.dtype, np.integer):
        if np.issubdtype(table.dtype, np.floating) and np.all(np.mod(table, 1) == 0):
            table = table.astype(np.int64)
        else:
            raise InvalidInputError("table entries must be integers")

    n = table.shape[0]
    bad = np.argwhere((table < 0) | (table >= n))
    if bad.size:
        i, j = (int(v) for v in bad[0])
        raise InvalidInputError(
            f"table entry ({i}, {j}) = {int(table[i, j])} out of range 0..{n - 1}",
            details={"row": i, "column": j},
        )

    witness = associativity_witness(table)
    if witness is not None:
        i, j, k = witness
        raise AssociativityError(
            f"table is not associative at ({i}, {j}, {k})",
            details={"witness": list(witness)},
        )
    logger.debug("table_validated", order=n)
    return FiniteSemigroup(table=table, name=name)


def identity_element(semigroup: FiniteSemigroup) -> Optional[int]:
    """Index of the two-sided identity, None if there is none."""
    table = semigroup.table
    n = semigroup.order
    rng = np.arange(n)
    for e in range(n):
        if np.array_equal(table[e], rng) and np.array_equal(table[:, e], rng):
            return e
    return None


def is_group(semigroup: FiniteSemigroup) -> bool:
    """True when the table is a Latin square with an identity."""
    if identity_element(semigroup) is None:
        return False
    table = semigroup.table
    n = semigroup.order
    rows_ok = all(len(np.unique(row)) == n for row in table)
    cols_ok = all(len(np.unique(col)) == n for col in table.T)
    return rows_ok and cols_ok


def is_commutative(semigroup: FiniteSemigroup) -> bool:
    """True when the table is symmetric."""
    return bool(np.array_equal(semigroup.table, semigroup.table.T))
