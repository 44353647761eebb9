"""Block graph: connection rules, adjacency matrix and Markovian path sampling."""

from .rules import DimensionMismatchError, GraphError, allowed_successor
from .block_graph import (
    DEFAULT_MAX_NODES,
    BlockGraph,
    GraphLimitError,
    build_graph,
    default_start_node,
    find_dead_ends,
)
from .paths import (
    DeadEndError,
    InvalidPathError,
    Path,
    StartPolicy,
    StartVariant,
    extend_path,
    random_path,
    validate_path,
)
from .io import graph_to_text, load_path, path_from_text, path_to_text, save_graph, save_path

__all__ = [
    'DimensionMismatchError',
    'GraphError',
    'allowed_successor',
    'DEFAULT_MAX_NODES',
    'BlockGraph',
    'GraphLimitError',
    'build_graph',
    'default_start_node',
    'find_dead_ends',
    'DeadEndError',
    'InvalidPathError',
    'Path',
    'StartPolicy',
    'StartVariant',
    'extend_path',
    'random_path',
    'validate_path',
    'graph_to_text',
    'load_path',
    'path_from_text',
    'path_to_text',
    'save_graph',
    'save_path',
]
