"""Phase-1 tableau simplex with Bland's rule."""

from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from shared.config import get_config
from shared.exceptions import NumericalError
from shared.logging_setup import get_logger

logger = get_logger(__name__)


@dataclass
class PhaseOneOutcome:
    """Result of minimizing the sum of artificials for A x = b, x >= 0."""

    feasible: bool
    x: np.ndarray
    duals: np.ndarray
    infeasibility: float
    pivots: int


class PhaseOneSimplex:
    """Dense phase-1 simplex solving the feasibility problem A x = b, x >= 0."""

    def __init__(self, config: Optional[Dict] = None):
        """
        Initialize the solver.

        Args:
            config: Optional configuration dictionary. If None, loads from AppConfig.
        """
        if config is None:
            lp = get_config().lp
            self.config = {
                "pivot_tol": lp.pivot_tol,
                "feasibility_tol": lp.feasibility_tol,
                "max_pivot_factor": lp.max_pivot_factor,
            }
        else:
            self.config = config

    def solve(self, coefficients: np.ndarray, rhs: np.ndarray) -> PhaseOneOutcome:
        """
        Minimize the total artificial mass starting from the artificial basis.

        The returned duals y are the phase-1 simplex multipliers; when the
        optimum is positive, z = -y satisfies A^T z >= 0 and b^T z < 0.

        Args:
            coefficients: Constraint matrix A (m x n)
            rhs: Right-hand side b (m)

        Returns:
            PhaseOneOutcome
        """
        pivot_tol = self.config["pivot_tol"]
        feasibility_tol = self.config["feasibility_tol"]

        a = np.asarray(coefficients, dtype=np.float64)
        b = np.asarray(rhs, dtype=np.float64).ravel()
        m, n = a.shape
        sign = np.where(b < 0, -1.0, 1.0)
        a = a * sign[:, None]
        b = b * sign

        tableau = np.zeros((m + 1, n + m + 1))
        tableau[:m, :n] = a
        tableau[:m, n:n + m] = np.eye(m)
        tableau[:m, -1] = b
        tableau[m, :n] = -a.sum(axis=0)
        tableau[m, -1] = -b.sum()
        basis = list(range(n, n + m))

        max_pivots = self.config["max_pivot_factor"] * (m + n)
        pivots = 0
        while True:
            entering = np.flatnonzero(tableau[m, :-1] < -pivot_tol)
            if entering.size == 0:
                break
            if pivots >= max_pivots:
                raise NumericalError(
                    "simplex pivot limit reached",
                    details={"pivots": pivots, "rows": m, "columns": n},
                )
            j = int(entering[0])
            column = tableau[:m, j]
            eligible = np.flatnonzero(column > pivot_tol)
            if eligible.size == 0:
                # Phase-1 objective is bounded below by zero.
                raise NumericalError("phase-1 simplex reported an unbounded ray")
            ratios = tableau[eligible, -1] / column[eligible]
            best = ratios.min()
            ties = eligible[ratios <= best + pivot_tol * (1.0 + abs(best))]
            i = int(min(ties, key=lambda r: basis[r]))
            self._pivot(tableau, i, j)
            basis[i] = j
            pivots += 1

        infeasibility = float(-tableau[m, -1])
        x = np.zeros(n)
        for row, var in enumerate(basis):
            if var < n:
                x[var] = tableau[row, -1]
        duals = (1.0 - tableau[m, n:n + m]) * sign

        logger.debug("phase_one_done", rows=m, columns=n, pivots=pivots, infeasibility=infeasibility)
        return PhaseOneOutcome(
            feasible=infeasibility <= feasibility_tol,
            x=x,
            duals=duals,
            infeasibility=infeasibility,
            pivots=pivots,
        )

    @staticmethod
    def _pivot(tableau: np.ndarray, row: int, col: int) -> None:
        tableau[row] /= tableau[row, col]
        pivot_row = tableau[row].copy()
        tableau -= np.outer(tableau[:, col], pivot_row)
        tableau[row] = pivot_row
