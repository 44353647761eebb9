"""MNIST ingestion from IDX files: two digits, downscaled to 16x16."""

import logging
import struct
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
from scipy import ndimage

from utils.checksum import calculate_checksum

from .dataset import CLASS_LABELS, Dataset, DatasetError, data_qubits_for


logger = logging.getLogger(__name__)

IMAGE_MAGIC = 0x00000803
LABEL_MAGIC = 0x00000801
DEFAULT_DIGITS = (1, 9)
TARGET_SIZE = 16


class IdxFormatError(DatasetError):
    """Exception raised for bad magic numbers, truncated files or mismatched counts."""
    pass


def read_idx(path: Union[str, Path], expected_magic: int) -> np.ndarray:
    """
    Read an unsigned-byte IDX file.

    The header is a big-endian magic number whose low byte is the number of
    dimensions, followed by one big-endian uint32 per dimension.

    Raises:
        FileNotFoundError: If the file does not exist
        IdxFormatError: On a bad magic number or a truncated payload
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"IDX file not found: {path}")
    raw = path.read_bytes()

    if len(raw) < 4:
        raise IdxFormatError(f"{path} is truncated: no header")
    (magic,) = struct.unpack(">I", raw[:4])
    if magic != expected_magic:
        raise IdxFormatError(f"{path}: bad magic 0x{magic:08x}, expected 0x{expected_magic:08x}")

    ndim = magic & 0xFF
    header_size = 4 + 4 * ndim
    if len(raw) < header_size:
        raise IdxFormatError(f"{path} is truncated inside the dimension header")
    dims = struct.unpack(f">{ndim}I", raw[4:header_size])

    expected = int(np.prod(dims))
    available = len(raw) - header_size
    if available < expected:
        raise IdxFormatError(f"{path} is truncated: expected {expected} bytes of data, found {available}")
    return np.frombuffer(raw, dtype=np.uint8, count=expected, offset=header_size).reshape(dims)


def downscale(images: np.ndarray, size: int = TARGET_SIZE) -> np.ndarray:
    """Bilinear resize of a stack of square images to ``size x size``."""
    factor = size / images.shape[-1]
    scaled = ndimage.zoom(images, (1, factor, factor), order=1)
    return np.clip(scaled, 0.0, 1.0)


def load_mnist(
    image_file: Union[str, Path],
    label_file: Union[str, Path],
    digits: Sequence[int] = DEFAULT_DIGITS,
    size: int = TARGET_SIZE,
    limit: Optional[int] = None,
) -> Dataset:
    """
    Load two MNIST digits as a binary classification dataset.

    Images are kept only for ``digits``; pixels are scaled to [0, 1], images
    downscaled to ``size x size`` and flattened row-major. The first digit maps
    to (1, 0) and the second to (0, 1).

    Args:
        image_file: IDX3 image file
        label_file: IDX1 label file
        digits: The two digits to keep
        size: Side length after downscaling
        limit: Keep at most this many samples (in file order)

    Raises:
        IdxFormatError: On malformed files or image/label count mismatch
    """
    digits = tuple(int(d) for d in digits)
    if len(digits) != 2 or digits[0] == digits[1]:
        raise DatasetError(f"Need two distinct digits, got {digits}")

    images = read_idx(image_file, IMAGE_MAGIC)
    labels = read_idx(label_file, LABEL_MAGIC)
    if images.ndim != 3:
        raise IdxFormatError(f"Image file must be 3-dimensional, got shape {images.shape}")
    if labels.shape[0] != images.shape[0]:
        raise IdxFormatError(f"{images.shape[0]} images but {labels.shape[0]} labels")

    keep = np.flatnonzero(np.isin(labels, digits))
    if limit is not None:
        keep = keep[:limit]
    if keep.size == 0:
        raise DatasetError(f"No images of digits {digits} in {image_file}")

    pixels = images[keep].astype(np.float64) / 255.0
    features = downscale(pixels, size).reshape(keep.size, -1)
    kept_labels = labels[keep]
    one_hot = np.array(CLASS_LABELS, dtype=np.float64)[(kept_labels == digits[1]).astype(np.int64)]

    logger.info(f"Loaded {keep.size} MNIST images of digits {digits} ({size}x{size} features)")
    return Dataset(
        name="mnist",
        features=features,
        labels=one_hot,
        data_qubits=data_qubits_for(size * size),
        metadata={'digit': kept_labels.astype(np.int64)},
        provenance={
            'source': 'mnist',
            'digits': list(digits),
            'image_size': size,
            'image_file_md5': calculate_checksum(image_file),
            'label_file_md5': calculate_checksum(label_file),
        },
    )
