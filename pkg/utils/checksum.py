"""Checksums for cached datasets, source files and run bundles."""

import hashlib
import logging
from pathlib import Path
from typing import Union


logger = logging.getLogger(__name__)


def calculate_checksum(file_path: Union[str, Path]) -> str:
    """
    Calculate MD5 checksum of a file.

    Args:
        file_path: Path to the file

    Returns:
        MD5 hex digest
    """
    hasher = hashlib.md5()
    with open(file_path, "rb") as f:
        for chunk in iter(lambda: f.read(8192), b""):
            hasher.update(chunk)
    return hasher.hexdigest()


def verify_checksum(file_path: Union[str, Path], expected: str) -> bool:
    """
    Check that a file exists and matches a recorded checksum.

    Returns:
        True if valid, False otherwise
    """
    file_path = Path(file_path)
    if not file_path.exists():
        logger.warning(f"File missing: {file_path}")
        return False

    actual = calculate_checksum(file_path)
    if actual != expected:
        logger.warning(f"Checksum mismatch for {file_path}: expected {expected}, got {actual}")
        return False
    return True
