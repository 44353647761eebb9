"""Paths through the block graph and Markovian random walks."""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, List, Optional, Tuple

import numpy as np

from .block_graph import BlockGraph, default_start_node
from .rules import GraphError


logger = logging.getLogger(__name__)

ARROW = " -> "


# ===== Exceptions =====

class DeadEndError(GraphError):
    """Exception raised when a random walk reaches a node without successors."""
    pass


class InvalidPathError(GraphError):
    """Exception raised when a path breaks the connection rules."""
    pass


# ===== Path =====

@dataclass(frozen=True)
class Path:
    """Ordered library indices; each consecutive pair is an edge of the graph."""

    nodes: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(int(n) for n in self.nodes))
        if not self.nodes:
            raise InvalidPathError("A path needs at least one node")

    def __len__(self) -> int:
        return len(self.nodes)

    def __iter__(self):
        return iter(self.nodes)

    @property
    def last(self) -> int:
        return self.nodes[-1]

    def extended(self, segment: Iterable[int]) -> "Path":
        return Path(self.nodes + tuple(segment))

    def __str__(self) -> str:
        return ARROW.join(str(n) for n in self.nodes)

    @classmethod
    def parse(cls, text: str) -> "Path":
        """Parse ``4257 -> 6687 -> ...`` (brackets optional)."""
        cleaned = text.strip().strip("[]")
        try:
            return cls(tuple(int(part) for part in cleaned.split("->")))
        except ValueError as e:
            raise InvalidPathError(f"Cannot parse path '{text}'") from e


# ===== Start Policy =====

class StartVariant(str, Enum):
    """How the first node of a random path is chosen."""
    UNIFORM = "uniform"
    FIXED = "fixed"


@dataclass(frozen=True)
class StartPolicy:
    """First-node policy; ``FIXED`` without an index means the all-rotations block."""

    variant: StartVariant = StartVariant.FIXED
    index: Optional[int] = None

    @classmethod
    def uniform(cls) -> "StartPolicy":
        return cls(StartVariant.UNIFORM)

    @classmethod
    def fixed(cls, index: Optional[int] = None) -> "StartPolicy":
        return cls(StartVariant.FIXED, index)

    def pick(self, graph: BlockGraph, rng: np.random.Generator) -> int:
        if self.variant == StartVariant.UNIFORM:
            nodes = graph.nodes
            return int(nodes[rng.integers(nodes.size)])
        index = default_start_node(graph) if self.index is None else self.index
        if not graph.is_node(index):
            raise GraphError(f"Start block {index} is not a node of the graph (size {graph.size})")
        return index


# ===== Random Walks =====

def _walk(graph: BlockGraph, start: int, steps: int, rng: np.random.Generator) -> List[int]:
    """Uniform random walk of ``steps`` transitions; only the current node is consulted."""
    segment = []
    node = start
    for _ in range(steps):
        successors = graph.successors(node)
        if successors.size == 0:
            raise DeadEndError(f"Block {node} has no legal successor")
        node = int(successors[rng.integers(successors.size)])
        segment.append(node)
    return segment


def random_path(
    graph: BlockGraph,
    length: int,
    policy: StartPolicy,
    rng: np.random.Generator,
) -> Path:
    """
    Sample a path of exactly ``length`` nodes.

    Args:
        graph: Block graph
        length: Number of nodes (at least 1)
        policy: How the first node is chosen
        rng: Random stream

    Returns:
        The sampled path
    """
    if length < 1:
        raise GraphError(f"Path length must be at least 1, got {length}")
    start = policy.pick(graph, rng)
    return Path((start, *_walk(graph, start, length - 1, rng)))


def extend_path(
    graph: BlockGraph,
    path: Path,
    segment_length: int,
    rng: np.random.Generator,
) -> Path:
    """
    Append ``segment_length`` nodes by a random walk from the last node.

    The walk sees only ``path.last``, so two paths sharing a final node and an
    rng state receive the same segment.
    """
    if segment_length < 0:
        raise GraphError(f"Segment length must be non-negative, got {segment_length}")
    return path.extended(_walk(graph, path.last, segment_length, rng))


def validate_path(graph: BlockGraph, path: Path) -> None:
    """
    Check every node and transition of a path.

    Raises:
        InvalidPathError: Naming the first node or transition that is not allowed
    """
    for position, node in enumerate(path.nodes):
        if not graph.is_node(node):
            raise InvalidPathError(f"Position {position}: {node} is not a node of the graph")
    for position, (x, y) in enumerate(zip(path.nodes, path.nodes[1:])):
        if not graph.has_edge(x, y):
            raise InvalidPathError(f"Transition {position}: {x} -> {y} breaks the connection rules")
