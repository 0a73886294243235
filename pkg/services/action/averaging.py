"""Følner-box averaging of commuting affine orbit maps."""

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from itertools import product
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from shared.config import BOX_OFFSETS, get_config
from shared.exceptions import DimensionMismatchError, InvalidInputError, NonCommutingError
from shared.logging_setup import get_logger

logger = get_logger(__name__)

ORBIT_COMMUTATION_TOL = 1e-9


class OrbitMap:
    """
    Commuting affine maps Psi_g on a finite-dimensional value space.

    Values are numpy arrays of a fixed shape (a matrix, a vector or a
    scalar stored as shape ()). The maps are evaluated through their
    linearization x -> L_g x + c_g on flattened values.
    """

    def __init__(
        self,
        maps: Sequence[Callable[[np.ndarray], np.ndarray]],
        shape: Tuple[int, ...],
        dtype=np.float64,
        name: str = "orbit",
    ):
        """
        Initialize the orbit map.

        Args:
            maps: One affine callable per generator
            shape: Shape of the values
            dtype: numpy dtype of the values
            name: Label used in logs and reports
        """
        if len(maps) == 0:
            raise InvalidInputError("an orbit map needs at least one generator")
        self.maps = list(maps)
        self.shape = tuple(shape)
        self.dtype = np.dtype(dtype)
        self.name = name

    @property
    def k(self) -> int:
        """Number of generators."""
        return len(self.maps)

    @property
    def size(self) -> int:
        """Dimension of the flattened value space."""
        return int(np.prod(self.shape, dtype=int))

    def apply(self, g: int, value: np.ndarray) -> np.ndarray:
        """Psi_g(value)."""
        return np.asarray(self.maps[g](np.asarray(value, dtype=self.dtype)), dtype=self.dtype)

    @cached_property
    def linear_parts(self) -> List[Tuple[np.ndarray, np.ndarray]]:
        """(L_g, c_g) for every generator, read off from 0 and the standard basis."""
        parts = []
        zero = np.zeros(self.shape, dtype=self.dtype)
        for g in range(self.k):
            offset = self.apply(g, zero).reshape(-1)
            if offset.shape[0] != self.size:
                raise DimensionMismatchError(
                    f"map {g} of {self.name} does not preserve the value shape {self.shape}"
                )
            linear = np.empty((self.size, self.size), dtype=self.dtype)
            for i in range(self.size):
                unit = np.zeros(self.size, dtype=self.dtype)
                unit[i] = 1
                linear[:, i] = self.apply(g, unit.reshape(self.shape)).reshape(-1) - offset
            parts.append((linear, offset))
        return parts

    def commutation_defect(self) -> float:
        """max over pairs of |Psi_g Psi_h - Psi_h Psi_g| on {0, e_1, ..., e_n}, relative."""
        worst = 0.0
        parts = self.linear_parts
        for g in range(self.k):
            for h in range(g + 1, self.k):
                (lg, cg), (lh, ch) = parts[g], parts[h]
                linear = np.abs(lg @ lh - lh @ lg).max(initial=0.0)
                offset = np.abs(lg @ ch + cg - lh @ cg - ch).max(initial=0.0)
                scale = 1.0 + np.abs(lg).max(initial=0.0) * np.abs(lh).max(initial=0.0)
                worst = max(worst, float(max(linear, offset) / scale))
        return worst

    def fixed_point_defect(self, value: np.ndarray) -> float:
        """max_g |Psi_g(value) - value|_F."""
        value = np.asarray(value, dtype=self.dtype)
        return max(float(np.linalg.norm(self.apply(g, value) - value)) for g in range(self.k))


@dataclass
class FolnerSchedule:
    """Increasing box sides with a cap and a relative convergence tolerance."""

    sides: List[int]
    max_side: int
    rel_tol: float = 1e-10
    offset: str = "translated"

    def __post_init__(self):
        if not self.sides:
            raise ValueError("a schedule needs at least one side")
        if any(b <= a for a, b in zip(self.sides, self.sides[1:])):
            raise ValueError("schedule sides must be strictly increasing")
        if self.sides[0] < 1 or self.sides[-1] > self.max_side:
            raise ValueError(f"schedule sides must lie in 1..{self.max_side}")
        if self.offset not in BOX_OFFSETS:
            raise ValueError(f"offset must be one of {BOX_OFFSETS}")

    @classmethod
    def default(cls, generators: int, config: Optional[Dict] = None) -> "FolnerSchedule":
        """
        Schedule for an action with the given number of generators.

        Args:
            generators: Number of commuting generators k
            config: Optional averaging overrides (sides, max_side, rel_tol, offset)

        Returns:
            FolnerSchedule with every configured side up to the cap for k
        """
        averaging = get_config().averaging
        config = config or {}
        max_side = config.get("max_side", averaging.max_side_for(generators))
        sides = [n for n in config.get("sides", averaging.sides) if n <= max_side]
        if not sides:
            sides = [max_side]
        return cls(
            sides=sides,
            max_side=max_side,
            rel_tol=config.get("rel_tol", averaging.rel_tol),
            offset=config.get("offset", averaging.offset),
        )

    def first_exponent(self, side: int) -> int:
        """Smallest exponent of the box of the given side."""
        if self.offset == "translated":
            return side + 1
        if self.offset == "plain":
            return 1
        return 0


class ConvergenceStatus(str, Enum):
    """Outcome of an averaging run."""

    CONVERGED = "converged"
    MAX_ITERATIONS = "max_iterations"
    DIVERGED = "diverged"


@dataclass
class ConvergenceReport:
    """Per-box residual trace of an averaging run."""

    status: ConvergenceStatus
    residual: float
    history: List[Tuple[int, float]] = field(default_factory=list)
    boxes: int = 0
    max_orbit_norm: float = 0.0
    offset: str = "translated"
    reason: Optional[str] = None

    @property
    def converged(self) -> bool:
        """True when the final box passed the convergence test."""
        return self.status == ConvergenceStatus.CONVERGED

    @property
    def final_side(self) -> Optional[int]:
        """Side of the last box evaluated."""
        return self.history[-1][0] if self.history else None

    def to_dict(self) -> Dict:
        """Report payload."""
        return {
            "status": self.status.value,
            "residual": self.residual,
            "history": [[side, residual] for side, residual in self.history],
            "boxes": self.boxes,
            "max_orbit_norm": self.max_orbit_norm,
            "offset": self.offset,
            "reason": self.reason,
        }


class _Divergence(Exception):
    def __init__(self, reason: str, norm: float):
        super().__init__(reason)
        self.reason = reason
        self.norm = norm


def _cesaro_mean(
    linear: np.ndarray,
    offset: np.ndarray,
    value: np.ndarray,
    start: int,
    side: int,
    limit: float,
) -> Tuple[np.ndarray, float]:
    """(1/N) sum_{a=start}^{start+N-1} Psi^a(value) by the running-sum recurrence."""
    current = value
    peak = float(np.linalg.norm(current))
    for _ in range(start):
        current = linear @ current + offset
        norm = float(np.linalg.norm(current))
        if not norm <= limit:
            raise _Divergence("orbit_norm", norm)
        peak = max(peak, norm)
    total = current.copy()
    for _ in range(side - 1):
        current = linear @ current + offset
        total += current
        norm = float(np.linalg.norm(current))
        if not norm <= limit:
            raise _Divergence("orbit_norm", norm)
        peak = max(peak, norm)
    return total / side, peak


def box_mean(
    orbit_map: OrbitMap,
    seed: np.ndarray,
    side: int,
    schedule: FolnerSchedule,
) -> np.ndarray:
    """
    Mean of Psi_w(seed) over one box as the composition of per-generator Cesàro means.

    Args:
        orbit_map: Commuting affine maps
        seed: Starting value
        side: Box side N
        schedule: Supplies the box offset

    Returns:
        Box mean with the value shape
    """
    flat = np.asarray(seed, dtype=orbit_map.dtype).reshape(-1)
    start = schedule.first_exponent(side)
    for linear, offset in orbit_map.linear_parts:
        flat, _ = _cesaro_mean(linear, offset, flat, start, side, np.inf)
    return flat.reshape(orbit_map.shape)


def direct_box_mean(
    orbit_map: OrbitMap,
    seed: np.ndarray,
    side: int,
    schedule: FolnerSchedule,
) -> np.ndarray:
    """Mean over the box computed by enumerating every exponent vector."""
    start = schedule.first_exponent(side)
    exponents = range(start, start + side)
    total = np.zeros(orbit_map.shape, dtype=orbit_map.dtype)
    count = 0
    for word in product(exponents, repeat=orbit_map.k):
        value = np.asarray(seed, dtype=orbit_map.dtype)
        for g, a in enumerate(word):
            for _ in range(a):
                value = orbit_map.apply(g, value)
        total = total + value
        count += 1
    return total / count


def folner_average(
    orbit_map: OrbitMap,
    seed: np.ndarray,
    schedule: Optional[FolnerSchedule] = None,
    growth_limit: Optional[float] = None,
) -> Tuple[np.ndarray, ConvergenceReport]:
    """
    Average the orbit of seed over growing Følner boxes.

    A box is accepted when the mean is a fixed point of every Psi_g and
    agrees with the previous box mean, both within
    rel_tol * (1 + |mean|_F).

    Args:
        orbit_map: Commuting affine maps
        seed: Starting value of the orbit
        schedule: Box sides and tolerance (default for orbit_map.k)
        growth_limit: Abort when an orbit value exceeds this norm

    Returns:
        Tuple of (last box mean, ConvergenceReport)
    """
    if schedule is None:
        schedule = FolnerSchedule.default(orbit_map.k)
    seed = np.asarray(seed, dtype=orbit_map.dtype)
    if seed.shape != orbit_map.shape:
        raise DimensionMismatchError(f"seed has shape {seed.shape}, expected {orbit_map.shape}")

    defect = orbit_map.commutation_defect()
    if defect > ORBIT_COMMUTATION_TOL:
        raise NonCommutingError(
            f"maps of {orbit_map.name} do not commute",
            details={"defect": defect},
        )

    divergence_limit = get_config().averaging.divergence_limit
    limit = divergence_limit if growth_limit is None else min(growth_limit, divergence_limit)
    report = ConvergenceReport(
        status=ConvergenceStatus.MAX_ITERATIONS,
        residual=float("inf"),
        offset=schedule.offset,
    )
    previous: Optional[np.ndarray] = None
    mean = seed
    for side in schedule.sides:
        start = schedule.first_exponent(side)
        flat = seed.reshape(-1)
        try:
            for linear, offset in orbit_map.linear_parts:
                flat, peak = _cesaro_mean(linear, offset, flat, start, side, limit)
                report.max_orbit_norm = max(report.max_orbit_norm, peak)
        except _Divergence as exc:
            report.max_orbit_norm = max(report.max_orbit_norm, exc.norm)
            report.status = ConvergenceStatus.DIVERGED
            report.reason = "divergence" if limit == divergence_limit else "growth_limit"
            report.history.append((side, float("inf")))
            report.boxes += 1
            logger.warning(
                "folner_average_diverged",
                orbit=orbit_map.name,
                side=side,
                norm=exc.norm,
                reason=report.reason,
            )
            return mean, report

        mean = flat.reshape(orbit_map.shape)
        tolerance = schedule.rel_tol * (1.0 + float(np.linalg.norm(mean)))
        defect = orbit_map.fixed_point_defect(mean)
        difference = 0.0 if previous is None else float(np.linalg.norm(mean - previous))
        residual = max(defect, difference)
        report.history.append((side, residual))
        report.boxes += 1
        report.residual = residual
        logger.debug("folner_box", orbit=orbit_map.name, side=side, defect=defect, difference=difference)
        if residual <= tolerance:
            report.status = ConvergenceStatus.CONVERGED
            break
        previous = mean

    logger.info(
        "folner_average_finished",
        orbit=orbit_map.name,
        status=report.status.value,
        boxes=report.boxes,
        residual=report.residual,
    )
    return mean, report
