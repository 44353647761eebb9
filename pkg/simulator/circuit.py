"""Compilation of block sequences into parameterized circuits."""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence, Tuple

from library import BlockLibrary, GateBlock


logger = logging.getLogger(__name__)


# ===== Exceptions =====

class SimulationError(Exception):
    """Base exception for circuit simulation errors."""
    pass


class CircuitDimensionError(SimulationError):
    """Exception raised when states, angles or indices do not fit a circuit."""
    pass


# ===== Operations =====

class OpKind(str, Enum):
    """Elementary one-parameter gates."""
    RZ = "rz"
    RX = "rx"
    CRX = "crx"


@dataclass(frozen=True)
class Operation:
    """One elementary gate; ``slot`` indexes the angle vector."""

    kind: OpKind
    qubits: Tuple[int, ...]
    slot: int


# ===== Circuit =====

@dataclass(frozen=True)
class ParamCircuit:
    """
    A compiled block sequence.

    Each R gate expands to Rz, Rx, Rz (three angles, in that order); each CRx
    gate owns one angle. Angle slots follow block order, so the circuit of a
    path prefix owns a prefix of the angle vector.
    """

    k: int
    blocks: Tuple[GateBlock, ...]
    source: Tuple[int, ...]
    operations: Tuple[Operation, ...]

    @property
    def param_count(self) -> int:
        return len(self.operations)

    @property
    def depth(self) -> int:
        return len(self.blocks)

    def gate_counts(self) -> Tuple[int, int]:
        """Number of R gates and CRx gates."""
        rot = sum(block.rot_count for block in self.blocks)
        crx = sum(block.crx_count for block in self.blocks)
        return rot, crx


def _block_operations(block: GateBlock, first_slot: int) -> Iterable[Operation]:
    slot = first_slot
    for gate in block.ordered_gates:
        if gate.is_rot:
            qubit = gate.qubits
            yield Operation(OpKind.RZ, qubit, slot)
            yield Operation(OpKind.RX, qubit, slot + 1)
            yield Operation(OpKind.RZ, qubit, slot + 2)
            slot += 3
        else:
            yield Operation(OpKind.CRX, gate.qubits, slot)
            slot += 1


def compile_blocks(indices: Sequence[int], library: BlockLibrary) -> ParamCircuit:
    """
    Compile library blocks in the given order; connection rules are not checked.

    Raises:
        CircuitDimensionError: If an index is outside the library
    """
    blocks = []
    for position, index in enumerate(indices):
        if not 0 <= index < len(library):
            raise CircuitDimensionError(
                f"Block index {index} at position {position} outside library of size {len(library)}"
            )
        blocks.append(library[index])

    operations = []
    for block in blocks:
        operations.extend(_block_operations(block, len(operations)))

    return ParamCircuit(
        k=library.k,
        blocks=tuple(blocks),
        source=tuple(int(i) for i in indices),
        operations=tuple(operations),
    )


def compile_path(path, library: BlockLibrary) -> ParamCircuit:
    """Compile a graph path (any iterable of library indices) into a circuit."""
    return compile_blocks(tuple(path), library)
