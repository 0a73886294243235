"""Closure constructions: unitization, products, images, generation."""

from typing import Iterable, List, Sequence, Tuple

import numpy as np

from shared.exceptions import HomomorphismError, InvalidInputError
from shared.logging_setup import get_logger
from services.semigroup.table import FiniteSemigroup, identity_element

logger = get_logger(__name__)


def unitize(semigroup: FiniteSemigroup) -> FiniteSemigroup:
    """
    Adjoin a new unit, appended as the last element.

    The new unit is adjoined even when the semigroup already has one.

    Args:
        semigroup: Any finite semigroup

    Returns:
        Monoid of order n + 1
    """
    n = semigroup.order
    table = np.empty((n + 1, n + 1), dtype=np.int64)
    table[:n, :n] = semigroup.table
    table[:n, n] = np.arange(n)
    table[n, :] = np.arange(n + 1)
    name = f"{semigroup.name}^1" if semigroup.name else None
    return FiniteSemigroup(table=table, name=name)


def direct_product(first: FiniteSemigroup, second: FiniteSemigroup) -> FiniteSemigroup:
    """
    Componentwise product, element (s, t) at index s * |T| + t.

    Args:
        first: S
        second: T

    Returns:
        S x T
    """
    m = second.order
    s_table = first.table[:, None, :, None]
    t_table = second.table[None, :, None, :]
    table = (s_table * m + t_table).reshape(first.order * m, first.order * m)
    name = f"{first.name}x{second.name}" if first.name and second.name else None
    return FiniteSemigroup(table=table, name=name)


def hom_image(semigroup: FiniteSemigroup, mapping: Sequence[int]) -> FiniteSemigroup:
    """
    Table induced on the image of an index map.

    Args:
        semigroup: S
        mapping: f with f[i] in 0..m-1, onto 0..m-1

    Returns:
        The image semigroup f(S)
    """
    f = np.asarray(mapping, dtype=np.int64)
    n = semigroup.order
    if f.shape != (n,):
        raise InvalidInputError(f"mapping must have {n} entries, got shape {f.shape}")
    if np.any(f < 0):
        raise InvalidInputError("mapping has negative entries")
    m = int(f.max()) + 1
    if not np.array_equal(np.unique(f), np.arange(m)):
        raise InvalidInputError(
            "mapping is not onto 0..m-1",
            details={"image": np.unique(f).tolist()},
        )

    keys = (f[:, None] * m + f[None, :]).ravel()
    values = f[semigroup.table].ravel()
    image = np.full(m * m, -1, dtype=np.int64)
    image[keys] = values
    conflicts = np.flatnonzero(image[keys] != values)
    if conflicts.size:
        c = int(conflicts[0])
        other = int(np.flatnonzero((keys == keys[c]) & (values != values[c]))[0])
        witness = [list(divmod(c, n)), list(divmod(other, n))]
        raise HomomorphismError(
            f"mapping is not a homomorphism: pairs {witness[0]} and {witness[1]} "
            "have equal images but products with different images",
            details={"witness": witness},
        )
    return FiniteSemigroup(table=image.reshape(m, m))


def generated_subsemigroup(semigroup: FiniteSemigroup, elements: Iterable[int]) -> List[int]:
    """
    Sorted indices of the subsemigroup generated by the given elements.

    Args:
        semigroup: S
        elements: Generating indices

    Returns:
        Sorted element indices of the closure
    """
    table = semigroup.table
    generators = sorted(set(int(e) for e in elements))
    found = set(generators)
    frontier = list(generators)
    while frontier:
        new = []
        for x in frontier:
            for g in generators:
                for product in (int(table[x, g]), int(table[g, x])):
                    if product not in found:
                        found.add(product)
                        new.append(product)
        frontier = new
    return sorted(found)


def factor_embeddings(
    first: FiniteSemigroup,
    second: FiniteSemigroup,
) -> Tuple[List[int], List[int]]:
    """
    Indices of S x {1} and {1} x T inside S x T.

    Args:
        first: Monoid S
        second: Monoid T

    Returns:
        (left, right) index lists in the product
    """
    e_first = identity_element(first)
    e_second = identity_element(second)
    if e_first is None or e_second is None:
        raise InvalidInputError("factor embeddings need both factors to be monoids")
    m = second.order
    left = [s * m + e_second for s in range(first.order)]
    right = [e_first * m + t for t in range(m)]
    return left, right


def commuting_generation(product: FiniteSemigroup, left: List[int], right: List[int]) -> bool:
    """
    Check that two index sets commute elementwise and generate the product.

    Args:
        product: Semigroup containing both sets
        left: First subsemigroup indices
        right: Second subsemigroup indices

    Returns:
        True when every l*r = r*l and left and right generate everything
    """
    table = product.table
    left_idx = np.asarray(left)[:, None]
    right_idx = np.asarray(right)[None, :]
    commute = bool(np.array_equal(table[left_idx, right_idx], table[right_idx, left_idx]))
    generated = generated_subsemigroup(product, list(left) + list(right))
    return commute and len(generated) == product.order
