"""Gate-block library: blocks, encoding vectors, enumeration and counts."""

from .gateblock import (
    EncodingVector,
    Gate,
    GateBlock,
    GateKind,
    InvalidBlockError,
    LibraryError,
    MalformedVectorError,
    decode_vector,
    encode_block,
    vector_length,
)
from .enumeration import (
    DEFAULT_MAX_BLOCKS,
    BlockLibrary,
    LibraryLimitError,
    LibraryMode,
    LibrarySpec,
    SpecMismatchError,
    count_closed_form,
    enumerate_library,
    extend_library,
)
from .io import LibraryFormatError, library_from_text, library_to_text, load_library, save_library

__all__ = [
    'EncodingVector',
    'Gate',
    'GateBlock',
    'GateKind',
    'InvalidBlockError',
    'LibraryError',
    'MalformedVectorError',
    'decode_vector',
    'encode_block',
    'vector_length',
    'DEFAULT_MAX_BLOCKS',
    'BlockLibrary',
    'LibraryLimitError',
    'LibraryMode',
    'LibrarySpec',
    'SpecMismatchError',
    'count_closed_form',
    'enumerate_library',
    'extend_library',
    'LibraryFormatError',
    'library_from_text',
    'library_to_text',
    'load_library',
    'save_library',
]
