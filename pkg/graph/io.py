"""Text export of block graphs and paths."""

import logging
from pathlib import Path as FilePath
from typing import Union

from .block_graph import BlockGraph
from .paths import Path


logger = logging.getLogger(__name__)


def graph_to_text(graph: BlockGraph) -> str:
    """
    Adjacency list, one active node per line: ``x: y1 y2 ...``.

    The header records the node count and the adjacency digest.
    """
    lines = [f"# nodes={graph.node_count} edges={graph.edge_count} sha256={graph.digest()}"]
    for node in graph.nodes:
        successors = " ".join(str(y) for y in graph.successors(int(node)))
        lines.append(f"{int(node)}: {successors}".rstrip())
    return "\n".join(lines) + "\n"


def save_graph(graph: BlockGraph, path: Union[str, FilePath]) -> FilePath:
    path = FilePath(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(graph_to_text(graph))
    logger.info(f"Saved adjacency list for {graph.node_count} nodes to {path}")
    return path


def path_to_text(path: Path) -> str:
    return str(path) + "\n"


def path_from_text(text: str) -> Path:
    """Parse arrow notation; raises InvalidPathError on malformed input."""
    return Path.parse(text)


def save_path(path: Path, target: Union[str, FilePath]) -> FilePath:
    target = FilePath(target)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(path_to_text(path))
    return target


def load_path(source: Union[str, FilePath]) -> Path:
    source = FilePath(source)
    if not source.exists():
        raise FileNotFoundError(f"Path file not found: {source}")
    return path_from_text(source.read_text())
