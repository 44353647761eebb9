"""Gate-blocks (depth-1 layers of R and CRx gates) and their encoding vectors."""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import FrozenSet, Iterable, Optional, Sequence, Tuple, Union


logger = logging.getLogger(__name__)


# ===== Exceptions =====

class LibraryError(Exception):
    """Base exception for gate-block library errors."""
    pass


class InvalidBlockError(LibraryError):
    """Exception raised when gates do not form a depth-1 block."""
    pass


class MalformedVectorError(LibraryError):
    """Exception raised when an encoding vector cannot be decoded."""
    pass


# ===== Gates =====

class GateKind(str, Enum):
    """Gate types available in a gate-block."""
    ROT = "rot"
    CRX = "crx"


@dataclass(frozen=True)
class Gate:
    """
    A single gate of a gate-block.

    Qubits are 1-based. A rotation gate R (Rz-Rx-Rz) stores ``(q,)``; a
    controlled-Rx gate stores ``(control, target)``.
    """

    kind: GateKind
    qubits: Tuple[int, ...]

    def __post_init__(self):
        expected = 1 if self.kind == GateKind.ROT else 2
        if len(self.qubits) != expected:
            raise InvalidBlockError(f"{self.kind.value} gate needs {expected} qubit(s), got {self.qubits}")
        if len(set(self.qubits)) != len(self.qubits):
            raise InvalidBlockError(f"CRx control and target must differ, got {self.qubits}")
        if min(self.qubits) < 1:
            raise InvalidBlockError(f"Qubit indices are 1-based, got {self.qubits}")

    @classmethod
    def rot(cls, qubit: int) -> "Gate":
        return cls(GateKind.ROT, (qubit,))

    @classmethod
    def crx(cls, control: int, target: int) -> "Gate":
        return cls(GateKind.CRX, (control, target))

    @property
    def support(self) -> FrozenSet[int]:
        return frozenset(self.qubits)

    @property
    def is_rot(self) -> bool:
        return self.kind == GateKind.ROT

    @property
    def control(self) -> Optional[int]:
        return self.qubits[0] if self.kind == GateKind.CRX else None

    @property
    def target(self) -> Optional[int]:
        return self.qubits[1] if self.kind == GateKind.CRX else None

    def __str__(self) -> str:
        if self.is_rot:
            return f"R({self.qubits[0]})"
        return f"CRx({self.qubits[0]}->{self.qubits[1]})"


def _gate_sort_key(gate: Gate) -> Tuple[int, int]:
    return (min(gate.qubits), 0 if gate.is_rot else 1)


# ===== Gate-blocks =====

@dataclass(frozen=True)
class GateBlock:
    """
    A depth-1 layer on ``k`` qubits.

    Every qubit is touched by at most one gate, so the gates of a block commute
    and ``ordered_gates`` (sorted by lowest qubit) is a valid application order.
    """

    k: int
    gates: FrozenSet[Gate] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.k < 1:
            raise InvalidBlockError(f"Qubit count must be positive, got {self.k}")
        object.__setattr__(self, "gates", frozenset(self.gates))
        seen = set()
        for gate in self.gates:
            if max(gate.qubits) > self.k:
                raise InvalidBlockError(f"{gate} is outside a {self.k}-qubit block")
            if seen & gate.support:
                raise InvalidBlockError(f"{gate} shares a qubit with another gate of the block")
            seen |= gate.support

    @classmethod
    def of(cls, k: int, gates: Iterable[Gate]) -> "GateBlock":
        return cls(k, frozenset(gates))

    @classmethod
    def all_rotations(cls, k: int) -> "GateBlock":
        return cls(k, frozenset(Gate.rot(q) for q in range(1, k + 1)))

    @property
    def support(self) -> FrozenSet[int]:
        qubits = set()
        for gate in self.gates:
            qubits |= gate.support
        return frozenset(qubits)

    @property
    def ordered_gates(self) -> Tuple[Gate, ...]:
        return tuple(sorted(self.gates, key=_gate_sort_key))

    @property
    def rot_count(self) -> int:
        return sum(1 for g in self.gates if g.is_rot)

    @property
    def crx_count(self) -> int:
        return sum(1 for g in self.gates if not g.is_rot)

    @property
    def is_empty(self) -> bool:
        return not self.gates

    @property
    def is_adjacent(self) -> bool:
        """True when every CRx gate acts on neighbouring qubits."""
        return all(abs(g.qubits[0] - g.qubits[1]) == 1 for g in self.gates if not g.is_rot)

    def __str__(self) -> str:
        if self.is_empty:
            return "{}"
        return "{" + ", ".join(str(g) for g in self.ordered_gates) + "}"


# ===== Encoding Vectors =====

def vector_length(k: int) -> int:
    """Length of the encoding vector of a ``k``-qubit block."""
    return k + 2 * (k // 2)


@dataclass(frozen=True, order=True)
class EncodingVector:
    """
    Integer vector representing a gate-block.

    The first ``2*floor(k/2)`` entries hold CRx gates as consecutive
    (control, target) pairs, the last ``k`` entries flag rotations: entry ``i``
    is ``i`` when qubit ``i`` carries an R gate and ``0`` otherwise.
    """

    entries: Tuple[int, ...]
    k: int = field(compare=False)

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(int(e) for e in self.entries))
        if len(self.entries) != vector_length(self.k):
            raise MalformedVectorError(
                f"Encoding vector for k={self.k} needs {vector_length(self.k)} entries, "
                f"got {len(self.entries)}"
            )

    @property
    def crx_section(self) -> Tuple[int, ...]:
        return self.entries[: 2 * (self.k // 2)]

    @property
    def rot_section(self) -> Tuple[int, ...]:
        return self.entries[2 * (self.k // 2):]

    @property
    def pairs(self) -> Tuple[Tuple[int, int], ...]:
        section = self.crx_section
        return tuple((section[i], section[i + 1]) for i in range(0, len(section), 2))

    def __str__(self) -> str:
        crx = ",".join(str(e) for e in self.crx_section)
        rot = ",".join(str(e) for e in self.rot_section)
        return f"{crx};{rot}"

    @classmethod
    def parse(cls, text: str, k: Optional[int] = None) -> "EncodingVector":
        """
        Parse the ``1,2,5,4,0,0;0,0,3,0,0,6,0`` notation.

        Args:
            text: Vector text, CRx section and rotation section separated by ``;``
            k: Expected qubit count (inferred from the rotation section if omitted)

        Returns:
            The parsed vector (not yet validated as a block)
        """
        cleaned = text.strip().strip("[]")
        if ";" not in cleaned:
            raise MalformedVectorError(f"Missing ';' separator in '{text}'")
        crx_text, rot_text = cleaned.split(";", 1)
        try:
            crx = [int(v) for v in crx_text.split(",") if v.strip()]
            rot = [int(v) for v in rot_text.split(",") if v.strip()]
        except ValueError as e:
            raise MalformedVectorError(f"Non-integer entry in '{text}'") from e
        inferred = len(rot)
        if k is not None and inferred != k:
            raise MalformedVectorError(f"Rotation section of '{text}' has {inferred} entries, expected {k}")
        if len(crx) != 2 * (inferred // 2):
            raise MalformedVectorError(f"CRx section of '{text}' has {len(crx)} entries for k={inferred}")
        return cls(tuple(crx + rot), inferred)


def encode_block(block: GateBlock) -> EncodingVector:
    """
    Encode a block into its canonical vector.

    CRx pairs are written sorted by their lower qubit, zero pairs last, which
    makes the block/vector correspondence one-to-one.
    """
    k = block.k
    crx_gates = sorted((g for g in block.gates if not g.is_rot), key=lambda g: min(g.qubits))
    crx_entries = []
    for gate in crx_gates:
        crx_entries.extend(gate.qubits)
    crx_entries.extend([0] * (2 * (k // 2) - len(crx_entries)))

    rotated = {g.qubits[0] for g in block.gates if g.is_rot}
    rot_entries = [q if q in rotated else 0 for q in range(1, k + 1)]
    return EncodingVector(tuple(crx_entries + rot_entries), k)


def decode_vector(
    vec: Union[EncodingVector, Sequence[int]],
    k: int,
    adjacent_only: bool = False,
) -> GateBlock:
    """
    Decode an encoding vector back into a gate-block.

    Args:
        vec: Encoding vector (any CRx pair order is accepted)
        k: Qubit count
        adjacent_only: Reject CRx gates on non-neighbouring qubits

    Returns:
        The decoded gate-block

    Raises:
        MalformedVectorError: If the vector does not describe a valid block
    """
    entries = vec.entries if isinstance(vec, EncodingVector) else tuple(int(e) for e in vec)
    if len(entries) != vector_length(k):
        raise MalformedVectorError(
            f"Encoding vector for k={k} needs {vector_length(k)} entries, got {len(entries)}"
        )

    split = 2 * (k // 2)
    gates = []
    used = set()

    def claim(qubit: int) -> None:
        if not 1 <= qubit <= k:
            raise MalformedVectorError(f"Qubit index {qubit} out of range 1..{k} in {list(entries)}")
        if qubit in used:
            raise MalformedVectorError(f"Qubit {qubit} appears twice in {list(entries)}")
        used.add(qubit)

    for i in range(0, split, 2):
        control, target = entries[i], entries[i + 1]
        if control == 0 and target == 0:
            continue
        if control == 0 or target == 0:
            raise MalformedVectorError(f"Half-specified CRx pair ({control},{target}) in {list(entries)}")
        if control == target:
            raise MalformedVectorError(f"CRx pair ({control},{target}) acts on one qubit")
        if adjacent_only and abs(control - target) != 1:
            raise MalformedVectorError(f"CRx pair ({control},{target}) is not on adjacent qubits")
        claim(control)
        claim(target)
        gates.append(Gate.crx(control, target))

    for position, value in enumerate(entries[split:], start=1):
        if value == 0:
            continue
        if value != position:
            raise MalformedVectorError(
                f"Rotation entry at position {position} must be 0 or {position}, got {value}"
            )
        claim(position)
        gates.append(Gate.rot(position))

    return GateBlock(k, frozenset(gates))
