"""Directed graph of legal gate-block successions."""

import hashlib
import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Tuple

import numpy as np

from library import BlockLibrary

from .rules import GraphError


logger = logging.getLogger(__name__)

# Largest library the adjacency matrix is built for
DEFAULT_MAX_NODES = 20_000
DEFAULT_CHUNK_ROWS = 256


# ===== Exceptions =====

class GraphLimitError(GraphError):
    """Exception raised when the graph would exceed the configured node count."""
    pass


# ===== Block Graph =====

class BlockGraph:
    """
    Adjacency structure over library indices.

    ``A[x][y]`` is set iff block ``y`` may directly follow block ``x``. Rows
    are stored as packed bits. Nodes removed from the graph (the empty block
    when excluded) keep their library index but have no edges and are never
    sampled.
    """

    def __init__(
        self,
        library: BlockLibrary,
        packed_rows: np.ndarray,
        active: np.ndarray,
        out_degrees: np.ndarray,
    ):
        self.library = library
        self._packed = packed_rows
        self._active = active
        self._out_degrees = out_degrees
        self._successors: Dict[int, np.ndarray] = {}
        self._successors_lock = threading.Lock()
        self._packed.setflags(write=False)
        self._active.setflags(write=False)

    @property
    def size(self) -> int:
        """Number of library indices covered by the matrix."""
        return len(self.library)

    @property
    def node_count(self) -> int:
        return int(self._active.sum())

    @property
    def nodes(self) -> np.ndarray:
        return np.flatnonzero(self._active)

    @property
    def edge_count(self) -> int:
        return int(self._out_degrees.sum())

    def is_node(self, index: int) -> bool:
        return 0 <= index < self.size and bool(self._active[index])

    def has_edge(self, x: int, y: int) -> bool:
        return bool((self._packed[x, y >> 3] >> (7 - (y & 7))) & 1)

    def row(self, x: int) -> np.ndarray:
        return np.unpackbits(self._packed[x], count=self.size).astype(bool)

    def successors(self, x: int) -> np.ndarray:
        """Sorted library indices that may follow ``x``. Safe to call from worker threads."""
        cached = self._successors.get(x)
        if cached is None:
            computed = np.flatnonzero(self.row(x))
            computed.setflags(write=False)
            with self._successors_lock:
                cached = self._successors.setdefault(x, computed)
        return cached

    def out_degree(self, x: int) -> int:
        return int(self._out_degrees[x])

    @property
    def out_degrees(self) -> np.ndarray:
        return self._out_degrees

    def adjacency(self) -> np.ndarray:
        """Dense boolean adjacency matrix (meant for small libraries)."""
        return np.unpackbits(self._packed, axis=1, count=self.size).astype(bool)

    def digest(self) -> str:
        """SHA-256 over the node set and the packed adjacency rows."""
        hasher = hashlib.sha256()
        hasher.update(np.packbits(self._active).tobytes())
        hasher.update(self._packed.tobytes())
        return hasher.hexdigest()

    def __repr__(self) -> str:
        return f"BlockGraph(nodes={self.node_count}, edges={self.edge_count})"


# ===== Construction =====

def _block_features(library: BlockLibrary) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Support bits, rotation bits, CRx membership matrix and CRx qubit bits."""
    support_bits: List[int] = []
    rot_bits: List[int] = []
    crx_columns: Dict[object, int] = {}
    members: List[Tuple[int, int]] = []

    for i, block in enumerate(library):
        support = 0
        rotations = 0
        for gate in block.gates:
            bits = sum(1 << (q - 1) for q in gate.qubits)
            support |= bits
            if gate.is_rot:
                rotations |= bits
            else:
                column = crx_columns.setdefault(gate, len(crx_columns))
                members.append((i, column))
        support_bits.append(support)
        rot_bits.append(rotations)

    membership = np.zeros((len(library), len(crx_columns)), dtype=np.float32)
    for i, column in members:
        membership[i, column] = 1.0

    crx_bits = [0] * len(crx_columns)
    for gate, column in crx_columns.items():
        crx_bits[column] = sum(1 << (q - 1) for q in gate.qubits)

    return (
        np.array(support_bits, dtype=np.uint64),
        np.array(rot_bits, dtype=np.uint64),
        membership,
        np.array(crx_bits, dtype=np.uint64),
    )


def build_graph(
    library: BlockLibrary,
    exclude_empty: bool = True,
    workers: int = 1,
    max_nodes: int = DEFAULT_MAX_NODES,
    chunk_rows: int = DEFAULT_CHUNK_ROWS,
) -> BlockGraph:
    """
    Evaluate the connection rules for every ordered pair of blocks.

    The rules are evaluated with bit masks over row chunks; chunks can be
    spread over a thread pool without changing the result.

    Args:
        library: Enumerated gate-block library
        exclude_empty: Drop the all-identity block from the node set
        workers: Number of threads used over row chunks
        max_nodes: Refuse libraries larger than this
        chunk_rows: Rows evaluated per chunk

    Returns:
        The block graph

    Raises:
        GraphLimitError: If the library has more than ``max_nodes`` blocks
    """
    n = len(library)
    if n > max_nodes:
        raise GraphLimitError(f"Library has {n} blocks, graph limit is {max_nodes}")
    if library.k < 2:
        raise GraphError("A block graph needs at least 2 qubits")

    support, rotations, membership, crx_bits = _block_features(library)
    active = np.ones(n, dtype=bool)
    empty = library.empty_index()
    if exclude_empty and empty is not None:
        active[empty] = False

    def evaluate_rows(start: int) -> Tuple[np.ndarray, np.ndarray]:
        stop = min(start + chunk_rows, n)
        rows = slice(start, stop)
        x_support = support[rows, None]

        # support: rotations and CRx gates of y must touch the support of x
        touches = (rotations[None, :] & ~x_support) == 0
        stranded = ((crx_bits[None, :] & x_support) == 0).astype(np.float32)
        touches &= (stranded @ membership.T) == 0
        # novelty: no repeated gate
        novel = (rotations[None, :] & rotations[rows, None]) == 0
        novel &= (membership[rows] @ membership.T) == 0

        adjacency = touches & novel
        adjacency &= active[None, :]
        adjacency &= active[rows, None]
        local = np.arange(stop - start)
        adjacency[local, local + start] = False
        return np.packbits(adjacency, axis=1), adjacency.sum(axis=1)

    starts = range(0, n, chunk_rows)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(evaluate_rows, starts))
    else:
        chunks = [evaluate_rows(start) for start in starts]

    packed = np.concatenate([c[0] for c in chunks], axis=0)
    out_degrees = np.concatenate([c[1] for c in chunks]).astype(np.int64)

    graph = BlockGraph(library, packed, active, out_degrees)
    logger.info(f"Built block graph with {graph.node_count} nodes and {graph.edge_count} edges")
    return graph


def default_start_node(graph: BlockGraph) -> int:
    """Library index of the all-rotations block."""
    return graph.library.all_rotations_index()


def find_dead_ends(graph: BlockGraph) -> Optional[np.ndarray]:
    """Active nodes without successors, or ``None`` when there are none."""
    nodes = graph.nodes
    dead = nodes[graph.out_degrees[nodes] == 0]
    return dead if dead.size else None
