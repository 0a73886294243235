"""Polar decomposition, PSD square roots and checked inverses."""

from typing import Optional, Tuple

import numpy as np
import scipy.linalg

from shared.config import get_config
from shared.exceptions import DimensionMismatchError, InvalidInputError, SingularMatrixError
from services.linalg.norms import induced_norm


def hermitian_part(matrix: np.ndarray) -> np.ndarray:
    """(M + M*) / 2."""
    matrix = np.asarray(matrix)
    return (matrix + matrix.conj().T) / 2


def _require_square(matrix: np.ndarray, name: str) -> None:
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DimensionMismatchError(f"{name} must be square, got shape {matrix.shape}")


def polar_decompose(matrix: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Right polar decomposition M = V P.

    Args:
        matrix: Square matrix

    Returns:
        (V, P) with P = (M*M)^(1/2) Hermitian PSD and V unitary
        (hence an isometry on ran P); real input gives real factors
    """
    matrix = np.asarray(matrix)
    _require_square(matrix, "polar_decompose input")
    unitary, positive = scipy.linalg.polar(matrix, side="right")
    return unitary, hermitian_part(positive)


def psd_sqrt(matrix: np.ndarray, hermitian_tol: Optional[float] = None) -> np.ndarray:
    """
    Positive square root of a Hermitian PSD matrix.

    Tolerances are relative to max(1, |B|_2).

    Args:
        matrix: Hermitian PSD matrix B
        hermitian_tol: Allowed |B - B*| and negative eigenvalue magnitude

    Returns:
        Hermitian PSD A with A @ A = B
    """
    matrix = np.asarray(matrix)
    _require_square(matrix, "psd_sqrt input")
    if hermitian_tol is None:
        hermitian_tol = get_config().linalg.hermitian_tol
    scale = max(1.0, induced_norm(matrix))

    asymmetry = float(np.abs(matrix - matrix.conj().T).max()) if matrix.size else 0.0
    if asymmetry > hermitian_tol * scale:
        raise InvalidInputError(
            "matrix is not Hermitian",
            details={"asymmetry": asymmetry},
        )

    eigenvalues, eigenvectors = scipy.linalg.eigh(hermitian_part(matrix))
    if eigenvalues.size and eigenvalues[0] < -hermitian_tol * scale:
        raise InvalidInputError(
            "matrix has a negative eigenvalue",
            details={"min_eigenvalue": float(eigenvalues[0])},
        )
    roots = np.sqrt(np.clip(eigenvalues, 0.0, None))
    return hermitian_part((eigenvectors * roots) @ eigenvectors.conj().T)


def checked_inverse(
    matrix: np.ndarray,
    max_condition: Optional[float] = None,
    name: str = "matrix",
) -> np.ndarray:
    """
    Inverse of a square matrix, refusing numerically singular input.

    Args:
        matrix: Square matrix
        max_condition: Largest admissible 2-norm condition number
        name: Label for error messages

    Returns:
        The inverse
    """
    matrix = np.asarray(matrix)
    _require_square(matrix, name)
    if max_condition is None:
        max_condition = get_config().linalg.max_condition
    if matrix.size == 0:
        return matrix.copy()
    condition = condition_number(matrix)
    if not np.isfinite(condition) or condition > max_condition:
        raise SingularMatrixError(
            f"{name} is numerically singular",
            details={"name": name, "condition": condition},
        )
    return scipy.linalg.inv(matrix)


def condition_number(matrix: np.ndarray) -> float:
    """2-norm condition number (inf for singular input)."""
    matrix = np.asarray(matrix)
    if matrix.size == 0:
        return 1.0
    singular_values = scipy.linalg.svdvals(matrix)
    if singular_values[-1] == 0.0:
        return float("inf")
    return float(singular_values[0] / singular_values[-1])
