"""SVD-based subspace algebra with explicit rank tolerances."""

from typing import Optional

import numpy as np
import scipy.linalg

from shared.config import get_config
from shared.exceptions import DimensionMismatchError
from shared.logging_setup import get_logger
from services.linalg.types import AffineSet, Subspace, common_dtype

logger = get_logger(__name__)

RANGE = "range"
KERNEL = "kernel"
SUM = "sum"
INTERSECTION = "intersection"


def _rank_tolerance(rtol: Optional[float]) -> float:
    if rtol is None:
        return get_config().linalg.rank_rtol
    if rtol <= 0:
        raise ValueError("rtol must be > 0")
    return rtol


def numerical_rank(singular_values: np.ndarray, rtol: float) -> int:
    """Number of singular values at or above rtol * sigma_max."""
    if singular_values.size == 0 or singular_values[0] == 0.0:
        return 0
    return int(np.count_nonzero(singular_values >= rtol * singular_values[0]))


def subspace_from_matrix(
    matrix: np.ndarray,
    mode: str = RANGE,
    rtol: Optional[float] = None,
) -> Subspace:
    """
    Range or kernel of a matrix as an orthonormal subspace.

    Args:
        matrix: Dense matrix (rows x cols)
        mode: "range" (subspace of K^rows) or "kernel" (subspace of K^cols)
        rtol: Singular values below rtol * sigma_max count as zero

    Returns:
        Subspace with orthonormal basis
    """
    rtol = _rank_tolerance(rtol)
    matrix = np.asarray(matrix)
    rows, cols = matrix.shape
    dtype = common_dtype(matrix)

    if mode not in (RANGE, KERNEL):
        raise ValueError(f"mode must be 'range' or 'kernel', got {mode!r}")

    if matrix.size == 0:
        if mode == RANGE:
            return Subspace.zero(rows, dtype)
        return Subspace.full(cols, dtype)

    left, singular_values, right_h = scipy.linalg.svd(matrix, full_matrices=True)
    rank = numerical_rank(singular_values, rtol)
    if mode == RANGE:
        return Subspace(rows, np.ascontiguousarray(left[:, :rank]).astype(dtype))
    return Subspace(cols, np.ascontiguousarray(right_h[rank:].conj().T).astype(dtype))


def span(columns: np.ndarray, rtol: Optional[float] = None) -> Subspace:
    """Orthonormalized span of the columns of a matrix."""
    return subspace_from_matrix(columns, RANGE, rtol)


def subspace_combine(
    first: Subspace,
    second: Subspace,
    mode: str = SUM,
    rtol: Optional[float] = None,
) -> Subspace:
    """
    Sum or intersection of two subspaces.

    Args:
        first: Subspace U
        second: Subspace W of the same ambient dimension
        mode: "sum" or "intersection"
        rtol: Rank tolerance

    Returns:
        U + W or U intersected with W
    """
    if first.ambient != second.ambient:
        raise DimensionMismatchError(
            f"ambient mismatch: {first.ambient} vs {second.ambient}",
            details={"first": first.ambient, "second": second.ambient},
        )
    ambient = first.ambient
    dtype = common_dtype(first.basis, second.basis)

    if mode == SUM:
        stacked = np.hstack([first.basis, second.basis]).astype(dtype)
        return subspace_from_matrix(stacked, RANGE, rtol)

    if mode != INTERSECTION:
        raise ValueError(f"mode must be 'sum' or 'intersection', got {mode!r}")

    if first.dim == 0 or second.dim == 0:
        return Subspace.zero(ambient, dtype)

    # Coefficients (a, b) with U a = W b.
    coupled = np.hstack([first.basis, -second.basis]).astype(dtype)
    coefficients = subspace_from_matrix(coupled, KERNEL, rtol)
    if coefficients.dim == 0:
        return Subspace.zero(ambient, dtype)
    vectors = first.basis @ coefficients.basis[: first.dim]
    return subspace_from_matrix(vectors, RANGE, rtol)


def principal_angles(first: Subspace, second: Subspace) -> np.ndarray:
    """
    Principal angles between two subspaces, ascending, in radians.

    Args:
        first: Subspace U
        second: Subspace W

    Returns:
        min(dim U, dim W) angles; empty when either subspace is zero
    """
    if first.ambient != second.ambient:
        raise DimensionMismatchError("ambient mismatch in principal_angles")
    if first.dim == 0 or second.dim == 0:
        return np.zeros(0)
    angles = scipy.linalg.subspace_angles(first.basis, second.basis)
    return np.sort(angles)


def subspace_distance(first: Subspace, second: Subspace) -> float:
    """
    Largest principal angle, or pi/2 when the dimensions differ.

    Zero means the two subspaces coincide.
    """
    if first.dim != second.dim:
        return float(np.pi / 2)
    angles = principal_angles(first, second)
    return float(angles[-1]) if angles.size else 0.0


def orthogonal_projector(subspace: Subspace) -> np.ndarray:
    """Orthogonal projector onto a subspace."""
    return subspace.projector()


def solve_affine_system(
    coefficients: np.ndarray,
    rhs: np.ndarray,
    rtol: Optional[float] = None,
    consistency_tol: Optional[float] = None,
) -> AffineSet:
    """
    Solve A x = b in the least-norm sense and describe all solutions.

    Args:
        coefficients: Matrix A (m x n)
        rhs: Vector b (m)
        rtol: Rank tolerance for the SVD
        consistency_tol: Residual |Ax - b| allowed relative to 1 + |b|

    Returns:
        AffineSet with the least-norm particular solution, an orthonormal
        basis of the kernel, the residual and a consistency flag
    """
    rtol = _rank_tolerance(rtol)
    if consistency_tol is None:
        consistency_tol = get_config().linalg.consistency_tol

    coefficients = np.asarray(coefficients)
    rhs = np.asarray(rhs).ravel()
    rows, cols = coefficients.shape
    if rhs.shape[0] != rows:
        raise DimensionMismatchError(
            f"right-hand side has {rhs.shape[0]} entries for {rows} equations"
        )
    dtype = common_dtype(coefficients, rhs)

    if rows == 0 or not np.any(coefficients):
        particular = np.zeros(cols, dtype=dtype)
        residual = float(np.linalg.norm(rhs))
        return AffineSet(
            particular=particular,
            homogeneous=np.eye(cols, dtype=dtype),
            residual=residual,
            consistent=residual <= consistency_tol * (1.0 + float(np.linalg.norm(rhs))),
        )

    left, singular_values, right_h = scipy.linalg.svd(coefficients, full_matrices=True)
    rank = numerical_rank(singular_values, rtol)
    projected = left[:, :rank].conj().T @ rhs
    particular = (right_h[:rank].conj().T @ (projected / singular_values[:rank])).astype(dtype)
    homogeneous = np.ascontiguousarray(right_h[rank:].conj().T).astype(dtype)

    residual = float(np.linalg.norm(coefficients @ particular - rhs))
    consistent = residual <= consistency_tol * (1.0 + float(np.linalg.norm(rhs)))
    logger.debug(
        "affine_system_solved",
        equations=rows,
        unknowns=cols,
        rank=rank,
        residual=residual,
        consistent=consistent,
    )
    return AffineSet(
        particular=particular,
        homogeneous=homogeneous,
        residual=residual,
        consistent=consistent,
    )
