"""Shared utility functions."""

from typing import Iterable, List, Optional

import numpy as np

from shared.logging_setup import get_logger

logger = get_logger(__name__)


def make_rng(seed: Optional[int] = None) -> np.random.Generator:
    """
    Create a deterministic random generator.

    Args:
        seed: Seed value (None gives fresh entropy)

    Returns:
        numpy Generator
    """
    return np.random.default_rng(seed)


def probe_mesh(dim: int, count: int, seed: int, complex_valued: bool = False) -> np.ndarray:
    """
    Build a deterministic mesh of unit probe vectors.

    The standard basis comes first, the remaining vectors are seeded
    Gaussian draws normalized to unit Euclidean length.

    Args:
        dim: Ambient dimension
        count: Number of probe vectors
        seed: Random seed
        complex_valued: Draw complex Gaussian entries

    Returns:
        Array of shape (count, dim)
    """
    rng = make_rng(seed)
    dtype = np.complex128 if complex_valued else np.float64
    mesh = np.zeros((count, dim), dtype=dtype)
    head = min(dim, count)
    mesh[:head, :head] = np.eye(head)
    tail = count - head
    if tail > 0:
        draws = rng.standard_normal((tail, dim))
        if complex_valued:
            draws = draws + 1j * rng.standard_normal((tail, dim))
        norms = np.linalg.norm(draws, axis=1, keepdims=True)
        mesh[head:] = draws / norms
    return mesh


def scaled_tolerance(tol: float, *magnitudes: float) -> float:
    """
    Scale an absolute tolerance by 1 + the given magnitudes.

    Args:
        tol: Base tolerance
        magnitudes: Norms of the quantities involved

    Returns:
        tol * (1 + sum of magnitudes)
    """
    return tol * (1.0 + float(sum(magnitudes)))


def max_or_zero(values: Iterable[float]) -> float:
    """Maximum of the values, 0.0 when empty."""
    values = list(values)
    return float(max(values)) if values else 0.0


def to_nested_list(array: np.ndarray, complex_pairs: Optional[bool] = None) -> List:
    """
    Convert an array to nested lists of floats.

    Complex entries become [re, im] pairs. With complex_pairs=None a complex
    array whose imaginary part is identically zero is written as real.

    Args:
        array: Real or complex numpy array
        complex_pairs: Force (True) or suppress (False) [re, im] pairs

    Returns:
        Nested Python lists
    """
    array = np.asarray(array)
    if complex_pairs is True and not np.iscomplexobj(array):
        array = array.astype(np.complex128)
    if np.iscomplexobj(array):
        if complex_pairs is False or (complex_pairs is None and not np.any(array.imag)):
            return array.real.astype(float).tolist()
        stacked = np.stack([array.real, array.imag], axis=-1)
        return stacked.astype(float).tolist()
    return array.astype(float).tolist()
