"""Exact induced operator norms for l1, l2 and linf."""

import numpy as np
import scipy.linalg

from services.linalg.types import NormKind


def induced_norm(matrix: np.ndarray, kind: NormKind = NormKind.L2) -> float:
    """
    Operator norm induced by a vector norm.

    Args:
        matrix: Dense matrix
        kind: Vector norm on both domain and codomain

    Returns:
        max column abs-sum (l1), largest singular value (l2) or
        max row abs-sum (linf)
    """
    matrix = np.asarray(matrix)
    if matrix.size == 0:
        return 0.0
    kind = NormKind(kind)
    if kind == NormKind.L1:
        return float(np.abs(matrix).sum(axis=0).max())
    if kind == NormKind.LINF:
        return float(np.abs(matrix).sum(axis=1).max())
    return float(scipy.linalg.svdvals(matrix)[0])


def lower_norm(matrix: np.ndarray, kind: NormKind = NormKind.L2) -> float:
    """
    Smallest gain inf |Mx| / |x| of a square matrix.

    For l2 this is the smallest singular value; for l1 and linf it is
    1 / |M^-1| and 0 when M is singular.

    Args:
        matrix: Square matrix
        kind: Vector norm

    Returns:
        Nonnegative lower bound constant
    """
    matrix = np.asarray(matrix)
    if matrix.size == 0:
        return 0.0
    kind = NormKind(kind)
    singular_values = scipy.linalg.svdvals(matrix)
    smallest = float(singular_values[-1])
    if kind == NormKind.L2 or smallest == 0.0:
        return smallest
    if smallest <= float(singular_values[0]) * np.finfo(float).eps * matrix.shape[0]:
        return 0.0
    return 1.0 / induced_norm(np.linalg.inv(matrix), kind)


def vector_norm(vectors: np.ndarray, kind: NormKind = NormKind.L2, axis: int = -1) -> np.ndarray:
    """
    Vector norm along an axis.

    Args:
        vectors: Array of vectors
        kind: Which norm
        axis: Axis holding the vector components

    Returns:
        Norms with the given axis reduced (a float for a single vector)
    """
    kind = NormKind(kind)
    order = {NormKind.L1: 1, NormKind.L2: 2, NormKind.LINF: np.inf}[kind]
    result = np.linalg.norm(np.asarray(vectors), ord=order, axis=axis)
    if np.ndim(result) == 0:
        return float(result)
    return result


def frobenius(matrix: np.ndarray) -> float:
    """Frobenius norm (Euclidean norm of the flattened array)."""
    return float(np.linalg.norm(np.asarray(matrix).ravel()))
