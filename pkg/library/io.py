"""Line-oriented text export/import for gate-block libraries."""

import logging
from pathlib import Path
from typing import Dict, Union

from .enumeration import BlockLibrary, LibraryMode, LibrarySpec, decode_library_vectors
from .gateblock import EncodingVector, LibraryError


logger = logging.getLogger(__name__)

HEADER_PREFIX = "#"


class LibraryFormatError(LibraryError):
    """Exception raised when a library file cannot be parsed."""
    pass


def library_to_text(library: BlockLibrary) -> str:
    """
    Serialize a library, one encoding vector per line.

    The header records the spec and block count, e.g.
    ``# k=7 mode=full include_empty=true count=896``.
    """
    lines = [f"{HEADER_PREFIX} {library.spec.describe()} count={len(library)}"]
    lines.extend(str(v) for v in library.vectors)
    return "\n".join(lines) + "\n"


def _parse_header(line: str) -> Dict[str, str]:
    fields = {}
    for token in line.lstrip(HEADER_PREFIX).split():
        if "=" not in token:
            raise LibraryFormatError(f"Malformed header token '{token}'")
        key, value = token.split("=", 1)
        fields[key] = value
    missing = [key for key in ("k", "mode", "count") if key not in fields]
    if missing:
        raise LibraryFormatError(f"Library header is missing: {', '.join(missing)}")
    return fields


def library_from_text(text: str) -> BlockLibrary:
    """
    Parse a library written by ``library_to_text``.

    Raises:
        LibraryFormatError: On a bad header, a malformed vector or a count mismatch
    """
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if not lines or not lines[0].startswith(HEADER_PREFIX):
        raise LibraryFormatError("Library text must start with a '#' header line")

    fields = _parse_header(lines[0])
    try:
        spec = LibrarySpec(
            k=int(fields["k"]),
            mode=LibraryMode(fields["mode"]),
            cutoff=int(fields["cutoff"]) if "cutoff" in fields else None,
            include_empty_block=fields.get("include_empty", "true").lower() == "true",
        )
        count = int(fields["count"])
    except (ValueError, LibraryError) as e:
        raise LibraryFormatError(f"Invalid library header '{lines[0]}': {e}") from e

    vectors = []
    for line_no, line in enumerate(lines[1:], start=2):
        try:
            vectors.append(EncodingVector.parse(line, spec.k))
        except LibraryError as e:
            raise LibraryFormatError(f"Line {line_no}: {e}") from e

    if len(vectors) != count:
        raise LibraryFormatError(f"Header announces {count} blocks, file has {len(vectors)}")

    try:
        return decode_library_vectors(spec, vectors)
    except LibraryError as e:
        raise LibraryFormatError(str(e)) from e


def save_library(library: BlockLibrary, path: Union[str, Path]) -> Path:
    """Write a library file and return its path."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(library_to_text(library))
    logger.info(f"Saved library with {len(library)} blocks to {path}")
    return path


def load_library(path: Union[str, Path]) -> BlockLibrary:
    """Read a library file."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Library file not found: {path}")
    library = library_from_text(path.read_text())
    logger.info(f"Loaded library with {len(library)} blocks from {path}")
    return library
