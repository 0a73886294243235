"""Core value types for the dense kernel."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Optional

import numpy as np

from shared.exceptions import DimensionMismatchError, InvalidInputError

ORTHONORMAL_TOL = 1e-12


class NormKind(str, Enum):
    """Ambient vector norm."""

    L1 = "l1"
    L2 = "l2"
    LINF = "linf"


class ScalarField(str, Enum):
    """Scalar field tag carried by every matrix."""

    REAL = "real"
    COMPLEX = "complex"


def field_of(matrix: np.ndarray) -> ScalarField:
    """Scalar field of an array, read from its dtype."""
    return ScalarField.COMPLEX if np.iscomplexobj(matrix) else ScalarField.REAL


def as_matrix(raw: Any, field: Optional[ScalarField] = None, name: str = "matrix") -> np.ndarray:
    """
    Convert raw input to a finite two-dimensional float or complex array.

    Args:
        raw: Nested sequence or array
        field: Requested scalar field (None keeps the input's own field)
        name: Label used in error messages

    Returns:
        float64 or complex128 array of shape (rows, cols)
    """
    array = np.asarray(raw)
    if array.ndim != 2:
        raise DimensionMismatchError(
            f"{name} must be two-dimensional, got shape {array.shape}",
            details={"name": name, "shape": list(array.shape)},
        )
    if field is None:
        field = field_of(array)

    if field == ScalarField.COMPLEX:
        array = array.astype(np.complex128)
    else:
        if np.iscomplexobj(array):
            if np.any(array.imag != 0):
                raise InvalidInputError(
                    f"{name} is tagged real but has nonzero imaginary parts",
                    details={"name": name},
                )
            array = array.real
        array = array.astype(np.float64)

    if not np.all(np.isfinite(array)):
        raise InvalidInputError(f"{name} has non-finite entries", details={"name": name})
    return array


def common_dtype(*arrays: np.ndarray) -> np.dtype:
    """float64 unless any operand is complex."""
    if any(np.iscomplexobj(a) for a in arrays):
        return np.dtype(np.complex128)
    return np.dtype(np.float64)


@dataclass(frozen=True)
class Subspace:
    """Subspace of K^ambient given by an orthonormal column basis."""

    ambient: int
    basis: np.ndarray = field(repr=False)

    def __post_init__(self):
        basis = np.array(self.basis, dtype=common_dtype(np.asarray(self.basis)))
        if basis.ndim != 2 or basis.shape[0] != self.ambient:
            raise DimensionMismatchError(
                f"basis shape {basis.shape} does not match ambient {self.ambient}",
                details={"ambient": self.ambient, "shape": list(basis.shape)},
            )
        if basis.shape[1] > self.ambient:
            raise DimensionMismatchError("subspace dimension exceeds ambient dimension")
        gram = basis.conj().T @ basis
        defect = np.abs(gram - np.eye(basis.shape[1])).max() if basis.shape[1] else 0.0
        if defect > ORTHONORMAL_TOL * max(1, self.ambient):
            raise InvalidInputError(
                "subspace basis is not orthonormal",
                details={"defect": float(defect)},
            )
        basis.setflags(write=False)
        object.__setattr__(self, "basis", basis)

    @property
    def dim(self) -> int:
        """Dimension of the subspace."""
        return int(self.basis.shape[1])

    @property
    def field(self) -> ScalarField:
        """Scalar field of the basis."""
        return field_of(self.basis)

    @classmethod
    def zero(cls, ambient: int, dtype=np.float64) -> "Subspace":
        """The zero subspace."""
        return cls(ambient, np.zeros((ambient, 0), dtype=dtype))

    @classmethod
    def full(cls, ambient: int, dtype=np.float64) -> "Subspace":
        """The whole space with the standard basis."""
        return cls(ambient, np.eye(ambient, dtype=dtype))

    def projector(self) -> np.ndarray:
        """Orthogonal projector onto the subspace."""
        return self.basis @ self.basis.conj().T

    def coordinates(self, vectors: np.ndarray) -> np.ndarray:
        """Coefficients of the orthogonal projection in the basis."""
        return self.basis.conj().T @ vectors


@dataclass(frozen=True)
class AffineSet:
    """Solution set {particular + homogeneous @ c} of a linear system."""

    particular: np.ndarray
    homogeneous: np.ndarray
    residual: float
    consistent: bool

    @property
    def is_empty(self) -> bool:
        """True when the system had no solution within tolerance."""
        return not self.consistent

    @property
    def dimension(self) -> int:
        """Dimension of the solution set (-1 when empty)."""
        return int(self.homogeneous.shape[1]) if self.consistent else -1

    def point(self, coefficients: Optional[np.ndarray] = None) -> np.ndarray:
        """Point of the set with the given homogeneous coefficients."""
        if coefficients is None or self.homogeneous.shape[1] == 0:
            return self.particular.copy()
        return self.particular + self.homogeneous @ np.asarray(coefficients)

    def nearest(self, vector: np.ndarray) -> np.ndarray:
        """Orthogonal projection of a flat vector onto the set."""
        offset = np.asarray(vector) - self.particular
        if self.homogeneous.shape[1] == 0:
            return self.particular.copy()
        return self.particular + self.homogeneous @ (self.homogeneous.conj().T @ offset)

    def distance(self, vector: np.ndarray) -> float:
        """Euclidean distance from a flat vector to the set."""
        if not self.consistent:
            return float("inf")
        return float(np.linalg.norm(np.asarray(vector) - self.nearest(vector)))
