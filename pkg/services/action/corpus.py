"""Named actions and deterministic test corpora."""

from typing import List, Optional, Tuple

import numpy as np
from scipy.stats import unitary_group

from shared.logging_setup import get_logger
from shared.utils import make_rng
from services.action.action import AbelianAction, build_action
from services.linalg import Subspace

logger = get_logger(__name__)

MAX_PERIOD = 6


def rotation(theta: float) -> np.ndarray:
    """Counterclockwise rotation of R^2 by theta."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def similar_rotation(theta: float = np.pi / 3, scales: Tuple[float, float] = (2.0, 1.0)) -> np.ndarray:
    """D R(theta) D^-1 with D = diag(scales)."""
    d = np.diag(scales)
    return d @ rotation(theta) @ np.linalg.inv(d)


def jordan_shift(n: int) -> np.ndarray:
    """Nilpotent Jordan block: ones on the superdiagonal."""
    return np.eye(n, k=1)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary."""
    if dim == 1:
        return np.array([[np.exp(2j * np.pi * rng.random())]])
    return unitary_group.rvs(dim, random_state=rng)


def _root_of_unity(rng: np.random.Generator) -> complex:
    period = int(rng.integers(1, MAX_PERIOD + 1))
    return complex(np.exp(2j * np.pi * int(rng.integers(0, period)) / period))


def periodic_unitary(dim: int, rng: np.random.Generator, basis: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Unitary whose eigenvalues are roots of unity of period at most 6.

    Args:
        dim: Matrix size
        rng: Random generator
        basis: Eigenbasis (random unitary when omitted)

    Returns:
        dim x dim unitary matrix
    """
    if basis is None:
        basis = random_unitary(dim, rng)
    spectrum = np.array([_root_of_unity(rng) for _ in range(dim)])
    return basis @ np.diag(spectrum) @ basis.conj().T


def commuting_normal_contractions(
    count: int = 50,
    max_dim: int = 8,
    seed: int = 5,
) -> List[AbelianAction]:
    """
    Pairs of commuting normal contractions on C^d, 2 <= d <= max_dim.

    Both generators share a random unitary eigenbasis. The first joint
    eigenvalue is (1, 1) so the fixed space is never trivial; every other
    eigenvalue is a root of unity of period <= 6 or has modulus in [0.1, 0.9].

    Args:
        count: Number of actions
        max_dim: Largest dimension
        seed: Random seed

    Returns:
        List of two-generator actions
    """
    rng = make_rng(seed)
    actions = []
    for _ in range(count):
        dim = int(rng.integers(2, max_dim + 1))
        basis = random_unitary(dim, rng)
        generators = []
        for _ in range(2):
            spectrum = np.empty(dim, dtype=np.complex128)
            spectrum[0] = 1.0
            for j in range(1, dim):
                if rng.random() < 0.5:
                    spectrum[j] = _root_of_unity(rng)
                else:
                    spectrum[j] = rng.uniform(0.1, 0.9) * np.exp(2j * np.pi * rng.random())
            generators.append(basis @ np.diag(spectrum) @ basis.conj().T)
        actions.append(build_action(generators))
    logger.debug("normal_contraction_corpus", count=count, seed=seed)
    return actions


def random_similarity(dim: int, rng: np.random.Generator, max_condition: float = 10.0) -> np.ndarray:
    """W1 diag(s) W2 with singular values in [1, max_condition]."""
    singular_values = rng.uniform(1.0, max_condition, size=dim)
    return random_unitary(dim, rng) @ np.diag(singular_values) @ random_unitary(dim, rng)


def commuting_unitary_similar(
    count: int = 20,
    max_dim: int = 4,
    seed: int = 9,
    generators: int = 2,
) -> List[Tuple[AbelianAction, np.ndarray]]:
    """
    Commuting matrices D U_g D^-1 with periodic commuting unitaries U_g.

    Args:
        count: Number of actions
        max_dim: Largest dimension (smallest is 2)
        seed: Random seed
        generators: Generators per action

    Returns:
        List of (action, D) with cond(D) <= 10
    """
    rng = make_rng(seed)
    result = []
    for _ in range(count):
        dim = int(rng.integers(2, max_dim + 1))
        similarity = random_similarity(dim, rng)
        inverse = np.linalg.inv(similarity)
        basis = random_unitary(dim, rng)
        unitaries = [periodic_unitary(dim, rng, basis) for _ in range(generators)]
        result.append((build_action([similarity @ u @ inverse for u in unitaries]), similarity))
    logger.debug("unitary_similar_corpus", count=count, seed=seed)
    return result


def unitary_plus_dilation(seed: int = 3, unitary_dim: int = 3, factor: float = 2.0) -> Tuple[AbelianAction, Subspace]:
    """
    T = U (+) factor I with U a periodic unitary, and Y the U-block.

    Args:
        seed: Random seed for U
        unitary_dim: Size of the unitary block
        factor: Scalar on the complementary block

    Returns:
        (action, Y)
    """
    rng = make_rng(seed)
    u = periodic_unitary(unitary_dim, rng)
    dim = unitary_dim + 1
    t = np.zeros((dim, dim), dtype=np.complex128)
    t[:unitary_dim, :unitary_dim] = u
    t[unitary_dim:, unitary_dim:] = factor
    y = Subspace(ambient=dim, basis=np.eye(dim, unitary_dim, dtype=np.complex128))
    return build_action([t]), y


def isometric_on_subspace(count: int = 20, max_dim: int = 5, seed: int = 11) -> List[Tuple[AbelianAction, Subspace]]:
    """
    Norm-one T with T(Y) = Y and T|Y unitary, in a random orthonormal frame.

    T = W (U (+) C) W* with U unitary and |C|_2 <= 1.

    Args:
        count: Number of instances
        max_dim: Largest ambient dimension (smallest is 2)
        seed: Random seed

    Returns:
        List of (action, Y)
    """
    rng = make_rng(seed)
    result = []
    for _ in range(count):
        dim = int(rng.integers(2, max_dim + 1))
        rank = int(rng.integers(1, dim))
        frame = random_unitary(dim, rng)
        block = np.zeros((dim, dim), dtype=np.complex128)
        block[:rank, :rank] = random_unitary(rank, rng)
        rest = dim - rank
        contraction = rng.standard_normal((rest, rest)) + 1j * rng.standard_normal((rest, rest))
        contraction /= max(1.0, float(np.linalg.norm(contraction, 2)))
        block[rank:, rank:] = contraction
        t = frame @ block @ frame.conj().T
        result.append((build_action([t]), Subspace(ambient=dim, basis=frame[:, :rank])))
    return result
