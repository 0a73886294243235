"""Exact fixed sets of commuting affine orbit maps."""

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from shared.logging_setup import get_logger
from services.action.averaging import OrbitMap
from services.linalg import AffineSet, solve_affine_system

logger = get_logger(__name__)


@dataclass(frozen=True)
class FixedSpace:
    """{v : Psi_g(v) = v for all g} as an affine set in value coordinates."""

    shape: Tuple[int, ...]
    solutions: AffineSet

    @property
    def is_empty(self) -> bool:
        """True when no common fixed point exists."""
        return self.solutions.is_empty

    @property
    def dimension(self) -> int:
        """Dimension of the fixed set, -1 when empty."""
        return self.solutions.dimension

    @property
    def particular(self) -> np.ndarray:
        """Least-Frobenius-norm fixed point."""
        return self.solutions.particular.reshape(self.shape)

    @property
    def basis(self) -> List[np.ndarray]:
        """Orthonormal basis of the homogeneous solutions, each in value shape."""
        homogeneous = self.solutions.homogeneous
        return [homogeneous[:, j].reshape(self.shape) for j in range(homogeneous.shape[1])]

    @property
    def residual(self) -> float:
        """Residual of the stacked system at the particular solution."""
        return self.solutions.residual

    def point(self, coefficients: Optional[np.ndarray] = None) -> np.ndarray:
        """particular + sum_j c_j basis_j."""
        return self.solutions.point(coefficients).reshape(self.shape)

    def nearest(self, value: np.ndarray) -> np.ndarray:
        """Closest fixed point in Frobenius norm."""
        return self.solutions.nearest(np.asarray(value).reshape(-1)).reshape(self.shape)

    def distance(self, value: np.ndarray) -> float:
        """Frobenius distance to the fixed set (inf when empty)."""
        return self.solutions.distance(np.asarray(value).reshape(-1))


def fixed_space(orbit_map: OrbitMap, rtol: Optional[float] = None) -> FixedSpace:
    """
    Solve the stacked system (L_g - I) v = -c_g over all generators.

    Args:
        orbit_map: Commuting affine maps
        rtol: Rank tolerance for the least-squares solve

    Returns:
        FixedSpace; empty when the system is inconsistent
    """
    identity = np.eye(orbit_map.size, dtype=orbit_map.dtype)
    blocks = [linear - identity for linear, _ in orbit_map.linear_parts]
    rhs = [-offset for _, offset in orbit_map.linear_parts]
    solutions = solve_affine_system(np.vstack(blocks), np.concatenate(rhs), rtol=rtol)
    logger.debug(
        "fixed_space_solved",
        orbit=orbit_map.name,
        dimension=solutions.dimension,
        residual=solutions.residual,
    )
    return FixedSpace(shape=orbit_map.shape, solutions=solutions)
