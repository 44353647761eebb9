"""Gate-block library enumeration, closed-form counts and incremental construction."""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .gateblock import (
    EncodingVector,
    Gate,
    GateBlock,
    LibraryError,
    decode_vector,
    encode_block,
)


logger = logging.getLogger(__name__)

# Enumeration refuses libraries larger than this unless told otherwise
DEFAULT_MAX_BLOCKS = 250_000


# ===== Exceptions =====

class LibraryLimitError(LibraryError):
    """Exception raised when a library would exceed the configured size."""

    def __init__(self, count: int, limit: int):
        super().__init__(f"Library would contain {count} blocks, limit is {limit}")
        self.count = count
        self.limit = limit


class SpecMismatchError(LibraryError):
    """Exception raised when libraries of incompatible specs are combined."""
    pass


# ===== Library Specification =====

class LibraryMode(str, Enum):
    """Restriction regime used to build a library."""
    FULL = "full"
    CUTOFF = "cutoff"
    MINIMAL = "minimal"
    NONADJACENT = "nonadjacent"


@dataclass(frozen=True)
class LibrarySpec:
    """
    Which gate-blocks a library contains.

    - ``full``: R or identity on every free qubit, CRx on adjacent qubits in
      either orientation.
    - ``cutoff``: at most ``cutoff`` CRx gates on adjacent qubits with the lower
      qubit as control, every free qubit carries R.
    - ``minimal``: the rotation layer plus the two staggered entangler layers.
    - ``nonadjacent``: like ``full`` but CRx may join any two qubits.
    """

    k: int
    mode: LibraryMode = LibraryMode.FULL
    cutoff: Optional[int] = None
    include_empty_block: bool = True

    def __post_init__(self):
        object.__setattr__(self, "mode", LibraryMode(self.mode))
        if self.k < 1:
            raise LibraryError(f"Qubit count must be positive, got {self.k}")
        if self.mode == LibraryMode.CUTOFF:
            if self.cutoff is None:
                raise LibraryError("Cutoff mode requires a cutoff value")
            if not 0 <= self.cutoff <= self.k // 2:
                raise LibraryError(f"Cutoff must lie in 0..{self.k // 2} for k={self.k}, got {self.cutoff}")
        elif self.cutoff is not None:
            raise LibraryError(f"Cutoff is only meaningful in cutoff mode, not {self.mode.value}")
        if self.mode == LibraryMode.MINIMAL and self.k < 3:
            raise LibraryError("Minimal mode needs at least 3 qubits")

    @property
    def adjacent_only(self) -> bool:
        return self.mode != LibraryMode.NONADJACENT

    @property
    def has_empty_block(self) -> bool:
        """Whether the all-identity block belongs to this library."""
        return self.include_empty_block and self.mode in (LibraryMode.FULL, LibraryMode.NONADJACENT)

    def describe(self) -> str:
        text = f"k={self.k} mode={self.mode.value}"
        if self.cutoff is not None:
            text += f" cutoff={self.cutoff}"
        return text + f" include_empty={str(self.include_empty_block).lower()}"


# ===== Block Library =====

class BlockLibrary:
    """
    Indexed set of gate-blocks.

    Blocks are ordered by the lexicographic order of their encoding vectors,
    so two enumerations of the same spec give the same index for every block.
    """

    def __init__(self, spec: LibrarySpec, blocks: Sequence[GateBlock]):
        keyed = sorted(((encode_block(b), b) for b in blocks), key=lambda pair: pair[0].entries)
        self.spec = spec
        self._vectors: Tuple[EncodingVector, ...] = tuple(v for v, _ in keyed)
        self._blocks: Tuple[GateBlock, ...] = tuple(b for _, b in keyed)
        self._index: Dict[GateBlock, int] = {b: i for i, b in enumerate(self._blocks)}
        if len(self._index) != len(self._blocks):
            raise LibraryError("Library contains duplicate blocks")
        for block in self._blocks:
            if block.k != spec.k:
                raise SpecMismatchError(f"Block {block} has k={block.k}, library has k={spec.k}")

    @property
    def k(self) -> int:
        return self.spec.k

    @property
    def blocks(self) -> Tuple[GateBlock, ...]:
        return self._blocks

    @property
    def vectors(self) -> Tuple[EncodingVector, ...]:
        return self._vectors

    def __len__(self) -> int:
        return len(self._blocks)

    def __getitem__(self, index: int) -> GateBlock:
        return self._blocks[index]

    def __iter__(self) -> Iterator[GateBlock]:
        return iter(self._blocks)

    def __contains__(self, block: GateBlock) -> bool:
        return block in self._index

    def vector(self, index: int) -> EncodingVector:
        return self._vectors[index]

    def index_of(self, block: GateBlock) -> int:
        try:
            return self._index[block]
        except KeyError:
            raise LibraryError(f"Block {block} is not in the library") from None

    def is_empty(self, index: int) -> bool:
        return self._blocks[index].is_empty

    def empty_index(self) -> Optional[int]:
        return self._index.get(GateBlock(self.k))

    def all_rotations_index(self) -> int:
        """Index of the block with an R gate on every qubit."""
        return self.index_of(GateBlock.all_rotations(self.k))

    def __repr__(self) -> str:
        return f"BlockLibrary({self.spec.describe()}, size={len(self)})"


# ===== Closed-Form Counts =====

def count_closed_form(spec: LibrarySpec) -> int:
    """
    Number of blocks in a library, in exact integer arithmetic.

    For ``full`` mode this is sum_i 2^(k-2i) C(k-i, i) 2^i, which equals
    ((1+sqrt3)^(k+1) - (1-sqrt3)^(k+1)) / (2 sqrt3) and satisfies
    f(k+1) = 2 f(k) + 2 f(k-1).

    Args:
        spec: Library specification

    Returns:
        Block count; the all-identity block is subtracted when the spec excludes it
    """
    k = spec.k
    if spec.mode == LibraryMode.FULL:
        total = sum(2 ** (k - 2 * i) * math.comb(k - i, i) * 2 ** i for i in range(k // 2 + 1))
    elif spec.mode == LibraryMode.CUTOFF:
        total = sum(math.comb(k - i, i) for i in range(spec.cutoff + 1))
    elif spec.mode == LibraryMode.MINIMAL:
        total = 3
    else:
        total = sum(
            2 ** (k - 2 * i) * math.perm(k, 2 * i) // math.perm(i, i) for i in range(k // 2 + 1)
        )

    if spec.mode in (LibraryMode.FULL, LibraryMode.NONADJACENT) and not spec.include_empty_block:
        total -= 1
    return total


# ===== Enumeration =====

def _walk(
    k: int,
    adjacent: bool,
    both_orientations: bool,
    allow_identity: bool,
    max_crx: int,
) -> Iterator[List[Gate]]:
    """Yield the gate lists of every block, deciding qubits from 1 to k."""

    def step(qubit: int, used: frozenset, gates: List[Gate], crx: int) -> Iterator[List[Gate]]:
        if qubit > k:
            yield gates
            return
        if qubit in used:
            yield from step(qubit + 1, used, gates, crx)
            return
        if allow_identity:
            yield from step(qubit + 1, used, gates, crx)
        yield from step(qubit + 1, used, gates + [Gate.rot(qubit)], crx)
        if crx >= max_crx:
            return
        partners = [qubit + 1] if adjacent else range(qubit + 1, k + 1)
        for partner in partners:
            if partner > k or partner in used:
                continue
            orientations = [(qubit, partner), (partner, qubit)] if both_orientations else [(qubit, partner)]
            for control, target in orientations:
                yield from step(
                    qubit + 1, used | {partner}, gates + [Gate.crx(control, target)], crx + 1
                )

    yield from step(1, frozenset(), [], 0)


def _minimal_blocks(k: int) -> List[GateBlock]:
    even_layer = [Gate.crx(q, q + 1) for q in range(1, 2 * (k // 2), 2)]
    # Odd k: pairs (2,3)...(k-1,k); even k: pairs (2,3)...(k-2,k-1)
    odd_layer = [Gate.crx(q, q + 1) for q in range(2, k, 2)]
    return [
        GateBlock.all_rotations(k),
        GateBlock.of(k, even_layer),
        GateBlock.of(k, odd_layer),
    ]


def enumerate_library(spec: LibrarySpec, max_blocks: int = DEFAULT_MAX_BLOCKS) -> BlockLibrary:
    """
    Enumerate every block allowed by ``spec`` in canonical order.

    Args:
        spec: Library specification
        max_blocks: Refuse to enumerate more blocks than this

    Returns:
        The block library

    Raises:
        LibraryLimitError: If the closed-form count exceeds ``max_blocks``
    """
    expected = count_closed_form(spec)
    if expected > max_blocks:
        raise LibraryLimitError(expected, max_blocks)

    k = spec.k
    if spec.mode == LibraryMode.MINIMAL:
        blocks = _minimal_blocks(k)
    else:
        if spec.mode == LibraryMode.FULL:
            gate_lists = _walk(k, adjacent=True, both_orientations=True, allow_identity=True, max_crx=k // 2)
        elif spec.mode == LibraryMode.NONADJACENT:
            gate_lists = _walk(k, adjacent=False, both_orientations=True, allow_identity=True, max_crx=k // 2)
        else:
            gate_lists = _walk(
                k, adjacent=True, both_orientations=False, allow_identity=False, max_crx=spec.cutoff
            )
        blocks = [GateBlock.of(k, gates) for gates in gate_lists]
        if not spec.include_empty_block:
            blocks = [b for b in blocks if not b.is_empty]

    library = BlockLibrary(spec, blocks)
    logger.info(f"Enumerated {len(library)} gate-blocks ({spec.describe()})")
    return library


def extend_library(lib_km1: BlockLibrary, lib_k: BlockLibrary) -> BlockLibrary:
    """
    Build the (k+1)-qubit full library from the (k-1)- and k-qubit ones.

    Every k-qubit block gets R or identity on the new qubit; every
    (k-1)-qubit block gets a CRx on the last two qubits in either orientation.

    Raises:
        SpecMismatchError: If the libraries are not consecutive full libraries
    """
    for lib in (lib_km1, lib_k):
        if lib.spec.mode != LibraryMode.FULL or not lib.spec.include_empty_block:
            raise SpecMismatchError(f"Extension needs full libraries with the empty block, got {lib!r}")
    if lib_km1.k != lib_k.k - 1:
        raise SpecMismatchError(f"Libraries must have k-1 and k qubits, got {lib_km1.k} and {lib_k.k}")

    k = lib_k.k
    new_qubit = k + 1
    blocks = []
    for block in lib_k:
        blocks.append(GateBlock.of(new_qubit, block.gates))
        blocks.append(GateBlock.of(new_qubit, block.gates | {Gate.rot(new_qubit)}))
    for block in lib_km1:
        blocks.append(GateBlock.of(new_qubit, block.gates | {Gate.crx(k, new_qubit)}))
        blocks.append(GateBlock.of(new_qubit, block.gates | {Gate.crx(new_qubit, k)}))

    library = BlockLibrary(LibrarySpec(new_qubit, LibraryMode.FULL), blocks)
    logger.info(f"Extended libraries k={lib_km1.k},{k} to k={new_qubit} ({len(library)} blocks)")
    return library


def decode_library_vectors(spec: LibrarySpec, vectors: Sequence[EncodingVector]) -> BlockLibrary:
    """Build a library from already-encoded vectors."""
    blocks = [decode_vector(v, spec.k, adjacent_only=spec.adjacent_only) for v in vectors]
    return BlockLibrary(spec, blocks)
