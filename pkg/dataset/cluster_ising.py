"""
Ground states of the cluster-Ising chain.

H(lambda) = -sum_j X_{j-1} Z_j X_{j+1} + lambda sum_j Y_j Y_{j+1}, periodic.
States with lambda < 1 lie in the SPT phase and are labeled (1, 0); the rest
are antiferromagnetic and labeled (0, 1).
"""

import logging
import operator
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import reduce
from typing import Dict, List, Sequence, Tuple

import numpy as np
from scipy import linalg, sparse

from .dataset import CLASS_LABELS, Dataset, DatasetError


logger = logging.getLogger(__name__)

MIN_SPINS = 3
MAX_SPINS = 12
DEGENERACY_GAP = 1e-10
PHASE_BOUNDARY = 1.0

IDENTITY = np.eye(2)
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]])
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]])
# sigma_y = i * SIGMA_Y_REAL, so Y_a Y_b = -SIGMA_Y_REAL_a SIGMA_Y_REAL_b
SIGMA_Y_REAL = np.array([[0.0, -1.0], [1.0, 0.0]])


@dataclass(frozen=True)
class ClusterIsingSpec:
    """Chain length and the lambda values to sample; the boundary is periodic."""

    spins: int
    lambdas: Tuple[float, ...]
    boundary: str = "periodic"

    def __post_init__(self):
        object.__setattr__(self, "lambdas", tuple(float(v) for v in self.lambdas))
        if not MIN_SPINS <= self.spins <= MAX_SPINS:
            raise DatasetError(f"Spin count must be in {MIN_SPINS}..{MAX_SPINS}, got {self.spins}")
        if not self.lambdas:
            raise DatasetError("At least one lambda value is required")
        if any(v < 0 for v in self.lambdas):
            raise DatasetError("Lambda values must be non-negative")
        if self.boundary != "periodic":
            raise DatasetError(f"Only periodic boundaries are supported, got '{self.boundary}'")


def _chain_operator(n: int, factors: Dict[int, np.ndarray]) -> sparse.csr_matrix:
    """Tensor product over sites 0..n-1; site 0 is the most significant qubit."""
    matrices = [sparse.csr_matrix(factors.get(site, IDENTITY)) for site in range(n)]
    return reduce(lambda a, b: sparse.kron(a, b, format="csr"), matrices)


def hamiltonian_terms(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    The two lambda-independent parts of H(lambda) = H_cluster + lambda H_yy.

    Both are real symmetric ``2**n x 2**n`` matrices.
    """
    cluster = reduce(operator.add, (
        _chain_operator(n, {(j - 1) % n: SIGMA_X, j: SIGMA_Z, (j + 1) % n: SIGMA_X})
        for j in range(n)
    ))
    yy = reduce(operator.add, (
        _chain_operator(n, {j: SIGMA_Y_REAL, (j + 1) % n: SIGMA_Y_REAL}) for j in range(n)
    ))
    return -cluster.toarray(), -yy.toarray()


def hamiltonian(n: int, lam: float) -> np.ndarray:
    """Dense H(lambda) for ``n`` spins with periodic boundary."""
    cluster, yy = hamiltonian_terms(n)
    return cluster + lam * yy


def ground_state(h: np.ndarray) -> Tuple[float, np.ndarray, float]:
    """
    Lowest eigenpair of a Hermitian matrix.

    The global phase is fixed so the largest-magnitude amplitude is real and
    positive.

    Returns:
        Tuple of (ground energy, ground state, gap to the next level)
    """
    energies, vectors = linalg.eigh(h, subset_by_index=[0, 1])
    state = vectors[:, 0]
    pivot = state[np.argmax(np.abs(state))]
    state = state * (np.conj(pivot) / abs(pivot))
    if not np.iscomplexobj(h):
        state = state.real
    state = state / np.linalg.norm(state)
    return float(energies[0]), state, float(energies[1] - energies[0])


def lambda_grid(count: int, low: float = 0.0, high: float = 2.0) -> List[float]:
    """
    Midpoints of ``count`` equal cells over [low, high]; an exact 1.0 is dropped.
    """
    if count <= 0:
        raise DatasetError(f"Grid size must be positive, got {count}")
    step = (high - low) / count
    values = [low + (i + 0.5) * step for i in range(count)]
    kept = [v for v in values if v != PHASE_BOUNDARY]
    if len(kept) != len(values):
        logger.warning(f"Dropped lambda = {PHASE_BOUNDARY} from the grid at the phase boundary")
    return kept


def gen_cluster_ising(spec: ClusterIsingSpec, workers: int = 1) -> Dataset:
    """
    Ground states for every lambda in ``spec`` as a labeled dataset.

    Features are the ``2**N`` ground-state amplitudes. A warning is logged when
    the two lowest levels are closer than ``DEGENERACY_GAP``; the eigensolver's
    first vector is kept.
    """
    cluster, yy = hamiltonian_terms(spec.spins)

    def solve(lam: float) -> Tuple[float, np.ndarray, float]:
        return ground_state(cluster + lam * yy)

    logger.info(f"Diagonalizing {len(spec.lambdas)} cluster-Ising Hamiltonians with N={spec.spins}")
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(solve, spec.lambdas))
    else:
        results = [solve(lam) for lam in spec.lambdas]

    for lam, (_, _, gap) in zip(spec.lambdas, results):
        if gap < DEGENERACY_GAP:
            logger.warning(f"Near-degenerate ground state at lambda={lam} (gap {gap:.3e})")

    lambdas = np.array(spec.lambdas, dtype=np.float64)
    labels = np.array(
        [CLASS_LABELS[0] if lam < PHASE_BOUNDARY else CLASS_LABELS[1] for lam in spec.lambdas],
        dtype=np.float64,
    ).reshape(-1, 2)
    return Dataset(
        name="spt",
        features=np.stack([state for _, state, _ in results]),
        labels=labels,
        data_qubits=spec.spins,
        metadata={
            'lambda': lambdas,
            'energy': np.array([energy for energy, _, _ in results]),
        },
        provenance={
            'source': 'cluster_ising',
            'spins': spec.spins,
            'boundary': spec.boundary,
            'lambdas': list(spec.lambdas),
        },
    )


def ground_energies(spins: int, lambdas: Sequence[float]) -> np.ndarray:
    """Ground energies along a lambda sweep."""
    cluster, yy = hamiltonian_terms(spins)
    return np.array([
        linalg.eigh(cluster + lam * yy, eigvals_only=True, subset_by_index=[0, 0])[0]
        for lam in lambdas
    ])
