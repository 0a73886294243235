"""Named semigroups and deterministic test corpora."""

from itertools import permutations, product
from typing import List, Tuple

import numpy as np

from shared.exceptions import HomomorphismError
from shared.logging_setup import get_logger
from shared.utils import make_rng
from services.semigroup.constructions import direct_product, hom_image
from services.semigroup.table import FiniteSemigroup, associativity_witness

logger = get_logger(__name__)


def cyclic_group(n: int) -> FiniteSemigroup:
    """Z_n under addition mod n."""
    idx = np.arange(n)
    return FiniteSemigroup(table=(idx[:, None] + idx[None, :]) % n, name=f"Z{n}")


def symmetric_group(degree: int = 3) -> FiniteSemigroup:
    """S_degree; s * t applies s first, then t."""
    elements = sorted(permutations(range(degree)))
    index = {p: i for i, p in enumerate(elements)}
    table = [
        [index[tuple(t[s[x]] for x in range(degree))] for t in elements]
        for s in elements
    ]
    return FiniteSemigroup(table=np.array(table), name=f"S{degree}")


def left_zero(n: int) -> FiniteSemigroup:
    """x * y = x."""
    return FiniteSemigroup(table=np.repeat(np.arange(n)[:, None], n, axis=1), name=f"left-zero{n}")


def right_zero(n: int) -> FiniteSemigroup:
    """x * y = y."""
    return FiniteSemigroup(table=np.repeat(np.arange(n)[None, :], n, axis=0), name=f"right-zero{n}")


def trivial() -> FiniteSemigroup:
    """The one-element semigroup."""
    return FiniteSemigroup(table=np.zeros((1, 1), dtype=np.int64), name="trivial")


def all_tables(max_order: int = 3) -> List[FiniteSemigroup]:
    """
    Every associative table of order 1..max_order, labelled copies included.

    Args:
        max_order: Largest order enumerated (3 gives 122 tables)

    Returns:
        Semigroups in enumeration order
    """
    found = []
    for n in range(1, max_order + 1):
        for entries in product(range(n), repeat=n * n):
            table = np.array(entries, dtype=np.int64).reshape(n, n)
            if associativity_witness(table) is None:
                found.append(FiniteSemigroup(table=table, name=f"T{n}-{len(found)}"))
    logger.debug("all_tables_enumerated", max_order=max_order, count=len(found))
    return found


def _transformation_closure(generators: List[tuple], limit: int) -> List[tuple]:
    """Closure of transformations under composition, stopping past limit elements."""
    found = set(generators)
    frontier = list(generators)
    while frontier and len(found) <= limit:
        new = []
        for f in frontier:
            for g in generators:
                composed = tuple(g[f[x]] for x in range(len(f)))
                if composed not in found:
                    found.add(composed)
                    new.append(composed)
        frontier = new
    return sorted(found)


def random_semigroups(count: int = 200, max_order: int = 5, seed: int = 1729) -> List[FiniteSemigroup]:
    """
    Deterministic pseudo-random semigroups of order <= max_order.

    Each is the closure of one or two random self-maps of a set of size
    2 to 4, kept when the closure is small enough.

    Args:
        count: Number of semigroups
        max_order: Largest admissible order
        seed: Random seed

    Returns:
        List of semigroups
    """
    rng = make_rng(seed)
    result: List[FiniteSemigroup] = []
    attempts = 0
    while len(result) < count:
        attempts += 1
        if attempts > 1000 * count:
            raise RuntimeError("random semigroup generation did not reach the requested count")
        degree = int(rng.integers(2, 5))
        generators = [
            tuple(int(v) for v in rng.integers(0, degree, size=degree))
            for _ in range(int(rng.integers(1, 3)))
        ]
        elements = _transformation_closure(generators, max_order)
        if len(elements) > max_order:
            continue
        index = {f: i for i, f in enumerate(elements)}
        # s * t applies s first, then t
        table = [
            [index[tuple(t[s[x]] for x in range(degree))] for t in elements]
            for s in elements
        ]
        result.append(FiniteSemigroup(table=np.array(table), name=f"R{len(result)}"))
    return result


def group_corpus() -> List[FiniteSemigroup]:
    """Every group of order <= 6 up to isomorphism."""
    return [trivial()] + [cyclic_group(n) for n in range(2, 7)] + [
        direct_product(cyclic_group(2), cyclic_group(2)),
        symmetric_group(3),
    ]


def homomorphisms(semigroup: FiniteSemigroup, max_image: int = 2) -> List[Tuple[int, ...]]:
    """
    Surjective homomorphisms onto images of order at most max_image.

    Each quotient is listed once, labelled in order of first occurrence.

    Args:
        semigroup: S
        max_image: Largest image order

    Returns:
        Index maps f with f(S) = 0..m-1
    """
    found = []
    for mapping in product(range(min(max_image, semigroup.order)), repeat=semigroup.order):
        if list(dict.fromkeys(mapping)) != list(range(max(mapping) + 1)):
            continue
        try:
            hom_image(semigroup, mapping)
        except HomomorphismError:
            continue
        found.append(mapping)
    return found
