"""Connection rules between consecutive gate-blocks."""

from library import GateBlock


# ===== Exceptions =====

class GraphError(Exception):
    """Base exception for block-graph errors."""
    pass


class DimensionMismatchError(GraphError):
    """Exception raised when blocks or circuits disagree on the qubit count."""
    pass


# ===== Rules =====

def allowed_successor(x: GateBlock, y: GateBlock) -> bool:
    """
    Check whether block ``y`` may directly follow block ``x``.

    Support rule: every gate of ``y`` touches a qubit used by ``x``; a gate on
    untouched qubits could be moved into ``x``.
    Novelty rule: ``y`` repeats no gate of ``x`` (same kind, same qubits, same
    control/target orientation).

    Raises:
        DimensionMismatchError: If the blocks are defined on different qubit counts
    """
    if x.k != y.k:
        raise DimensionMismatchError(f"Blocks have k={x.k} and k={y.k}")

    support = x.support
    for gate in y.gates:
        if not gate.support & support:
            return False
        if gate in x.gates:
            return False
    return True
