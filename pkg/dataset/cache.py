"""
Binary dataset container with a provenance sidecar.

Layout: 8-byte magic, little-endian uint32 format version, uint32 length of a
UTF-8 JSON index, the index itself, then one ``.npy`` blob per array in index
order. Nothing time-dependent is written, so equal datasets give equal bytes.
"""

import json
import logging
import struct
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Tuple, Union

import numpy as np

from utils.checksum import calculate_checksum, verify_checksum

from .dataset import Dataset, DatasetError


logger = logging.getLogger(__name__)

MAGIC = b"MQNEDSET"
FORMAT_VERSION = 1
PROVENANCE_SUFFIX = ".provenance.json"


class CacheFormatError(DatasetError):
    """Exception raised when a container is unreadable or has an unknown version."""
    pass


@dataclass
class ProvenanceRecord:
    """Sidecar metadata for a cached dataset."""

    name: str
    file_path: str
    checksum: str
    format_version: int
    sample_count: int
    feature_length: int
    data_qubits: int
    class_counts: List[int]
    partitions: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    source: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        """Convert to dictionary for JSON serialization."""
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ProvenanceRecord":
        """Create from dictionary."""
        return cls(**data)


def provenance_path(path: Union[str, Path]) -> Path:
    path = Path(path)
    return path.with_name(path.stem + PROVENANCE_SUFFIX)


def _arrays(dataset: Dataset) -> List[Tuple[str, np.ndarray]]:
    arrays = [('features', dataset.features), ('labels', dataset.labels)]
    arrays += [(f"partition:{name}", idx) for name, idx in sorted(dataset.partitions.items())]
    arrays += [(f"meta:{key}", values) for key, values in sorted(dataset.metadata.items())]
    return arrays


def _write_atomic(path: Path, write) -> None:
    """Write to a temp file then rename."""
    temp_path = path.with_suffix(path.suffix + ".tmp")
    try:
        with open(temp_path, "wb") as f:
            write(f)
        temp_path.replace(path)
    except IOError:
        if temp_path.exists():
            temp_path.unlink()
        raise


def save_dataset(dataset: Dataset, path: Union[str, Path]) -> Path:
    """
    Write ``dataset`` to ``path`` and its provenance sidecar next to it.

    Returns:
        Path of the container
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    arrays = _arrays(dataset)
    index = {
        'name': dataset.name,
        'data_qubits': dataset.data_qubits,
        'arrays': [name for name, _ in arrays],
        'provenance': dataset.provenance,
    }
    header = json.dumps(index, sort_keys=True).encode("utf-8")

    def write(f):
        f.write(MAGIC)
        f.write(struct.pack("<II", FORMAT_VERSION, len(header)))
        f.write(header)
        for _, values in arrays:
            np.lib.format.write_array(f, np.ascontiguousarray(values), allow_pickle=False)

    _write_atomic(path, write)

    summary = dataset.summary()
    record = ProvenanceRecord(
        name=dataset.name,
        file_path=path.name,
        checksum=calculate_checksum(path),
        format_version=FORMAT_VERSION,
        sample_count=summary['samples'],
        feature_length=summary['feature_length'],
        data_qubits=dataset.data_qubits,
        class_counts=summary['class_counts'],
        partitions=summary['partitions'],
        source=dataset.provenance,
    )
    sidecar = provenance_path(path)
    sidecar.write_text(json.dumps(record.to_dict(), indent=2, sort_keys=True) + "\n")
    logger.info(f"Saved dataset '{dataset.name}' ({len(dataset)} samples) to {path}")
    return path


def load_dataset(path: Union[str, Path]) -> Dataset:
    """
    Read a container written by ``save_dataset``.

    A checksum mismatch with the provenance sidecar is logged, not raised.

    Raises:
        FileNotFoundError: If the file does not exist
        CacheFormatError: On a bad magic, unknown version or corrupt payload
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Dataset file not found: {path}")
    sidecar = provenance_path(path)
    if sidecar.exists():
        verify_checksum(path, json.loads(sidecar.read_text())["checksum"])

    with open(path, "rb") as f:
        if f.read(len(MAGIC)) != MAGIC:
            raise CacheFormatError(f"{path} is not a dataset container")
        try:
            version, header_length = struct.unpack("<II", f.read(8))
            if version != FORMAT_VERSION:
                raise CacheFormatError(f"{path}: unsupported container version {version}")
            index = json.loads(f.read(header_length).decode("utf-8"))
            arrays = {name: np.lib.format.read_array(f, allow_pickle=False) for name in index['arrays']}
        except CacheFormatError:
            raise
        except (struct.error, ValueError, KeyError, EOFError) as e:
            raise CacheFormatError(f"Corrupt dataset container {path}: {e}") from e

    partitions = {name.split(":", 1)[1]: v for name, v in arrays.items() if name.startswith("partition:")}
    metadata = {name.split(":", 1)[1]: v for name, v in arrays.items() if name.startswith("meta:")}
    return Dataset(
        name=index['name'],
        features=arrays['features'],
        labels=arrays['labels'],
        data_qubits=index['data_qubits'],
        partitions=partitions,
        metadata=metadata,
        provenance=index.get('provenance', {}),
    )


def load_provenance(path: Union[str, Path]) -> ProvenanceRecord:
    """Read the sidecar written next to a container."""
    sidecar = provenance_path(path)
    if not sidecar.exists():
        raise FileNotFoundError(f"Provenance file not found: {sidecar}")
    return ProvenanceRecord.from_dict(json.loads(sidecar.read_text()))
