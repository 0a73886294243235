"""Coordinate descent of an operator norm over an affine family of matrices."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from shared.config import get_config
from shared.logging_setup import get_logger
from shared.utils import make_rng
from services.linalg import AffineSet, NormKind, induced_norm

logger = get_logger(__name__)

IMPROVEMENT_TOL = 1e-12
STEP_BOUNDS = (-2.0, 2.0)
STEP_XATOL = 1e-10


@dataclass
class DescentOutcome:
    """Best point found over all restarts."""

    matrix: np.ndarray
    norm: float
    start_norm: float
    restart: int
    sweeps: List[int] = field(default_factory=list)
    norms: List[float] = field(default_factory=list)


class AffineNormMinimizer:
    """
    Minimize |P0 + sum_j c_j H_j| over the coefficients c.

    Complex families are searched over real and imaginary parts
    separately. Restarts are independent and may run in a thread pool;
    ties between restarts go to the lowest restart index.
    """

    def __init__(
        self,
        solutions: AffineSet,
        shape: Tuple[int, int],
        norm: NormKind,
        config: Optional[dict] = None,
    ):
        """
        Initialize the minimizer.

        Args:
            solutions: Affine family in flattened (row-major) coordinates
            shape: Matrix shape of a point of the family
            norm: Operator norm to minimize
            config: Optional dictionary with restarts, restart_seed, max_sweeps, max_workers
        """
        if config is None:
            app = get_config()
            config = {
                "restarts": app.projection.restarts,
                "restart_seed": app.projection.restart_seed,
                "max_sweeps": app.projection.max_sweeps,
                "max_workers": app.performance.max_workers,
            }
        self.config = config
        self.solutions = solutions
        self.shape = tuple(shape)
        self.norm = NormKind(norm)
        self.complex_valued = np.iscomplexobj(solutions.homogeneous) or np.iscomplexobj(solutions.particular)
        self.dimension = solutions.homogeneous.shape[1]

    def _directions(self) -> List[np.ndarray]:
        columns = [self.solutions.homogeneous[:, j] for j in range(self.dimension)]
        if self.complex_valued:
            columns = columns + [1j * column for column in columns]
        return columns

    def _matrix(self, flat: np.ndarray) -> np.ndarray:
        return flat.reshape(self.shape)

    def objective(self, flat: np.ndarray) -> float:
        """Operator norm of a flattened point."""
        return induced_norm(self._matrix(flat), self.norm)

    def _descend(self, start: np.ndarray) -> Tuple[np.ndarray, float, int]:
        directions = self._directions()
        point = start.copy()
        value = self.objective(point)
        sweeps = 0
        for sweeps in range(1, self.config["max_sweeps"] + 1):
            before = value
            for direction in directions:
                found = minimize_scalar(
                    lambda t: self.objective(point + t * direction),
                    bounds=STEP_BOUNDS,
                    method="bounded",
                    options={"xatol": STEP_XATOL},
                )
                if found.fun < value:
                    point = point + found.x * direction
                    value = float(found.fun)
            if before - value <= IMPROVEMENT_TOL * max(1.0, before):
                break
        return point, value, sweeps

    def minimize(self, start: np.ndarray) -> DescentOutcome:
        """
        Run every restart and keep the best point.

        Restart 0 starts at the given point, later restarts at seeded
        perturbations of it inside the family.

        Args:
            start: Flattened point of the family

        Returns:
            DescentOutcome; its norm never exceeds the start norm
        """
        start = np.asarray(start).reshape(-1)
        start_norm = self.objective(start)
        if self.dimension == 0:
            return DescentOutcome(matrix=self._matrix(start).copy(), norm=start_norm, start_norm=start_norm, restart=0)

        rng = make_rng(self.config["restart_seed"])
        starts = [start]
        for _ in range(1, self.config["restarts"]):
            coefficients = rng.standard_normal(self.dimension)
            if self.complex_valued:
                coefficients = coefficients + 1j * rng.standard_normal(self.dimension)
            starts.append(start + self.solutions.homogeneous @ (0.5 * coefficients))

        with ThreadPoolExecutor(max_workers=self.config["max_workers"]) as executor:
            runs = list(executor.map(self._descend, starts))

        norms = [value for _, value, _ in runs]
        best = int(np.argmin(norms))
        point, value, _ = runs[best]
        if value >= start_norm:
            point, value, best = start, start_norm, 0
        logger.debug(
            "descent_finished",
            restarts=len(runs),
            best_restart=best,
            start_norm=start_norm,
            norm=value,
        )
        return DescentOutcome(
            matrix=self._matrix(point).copy(),
            norm=float(value),
            start_norm=start_norm,
            restart=best,
            sweeps=[s for _, _, s in runs],
            norms=norms,
        )
