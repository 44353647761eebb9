"""Labeled samples, partitions and seeded splitting."""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from simulator import encode_batch


logger = logging.getLogger(__name__)

# One-hot targets: class 0 is read out as g1, class 1 as g2
CLASS_LABELS = ((1, 0), (0, 1))


# ===== Exceptions =====

class DatasetError(Exception):
    """Base exception for dataset errors."""
    pass


class InsufficientSamplesError(DatasetError):
    """Exception raised when a split asks for more samples than exist."""
    pass


# ===== Types =====

class Partition(str, Enum):
    """Partition tags."""
    TRAIN = "train"
    VALIDATION = "validation"
    TEST = "test"


def one_hot(class_index: int) -> np.ndarray:
    return np.array(CLASS_LABELS[class_index], dtype=np.float64)


@dataclass(frozen=True, eq=False)
class Sample:
    """Feature vector with a one-hot label and optional metadata (lambda, digit, ...)."""

    features: np.ndarray
    label: Tuple[int, int]
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        label = tuple(int(a) for a in self.label)
        if label not in CLASS_LABELS:
            raise DatasetError(f"Label must be one-hot, got {self.label}")
        object.__setattr__(self, "label", label)
        object.__setattr__(self, "features", np.asarray(self.features))

    @property
    def class_index(self) -> int:
        return CLASS_LABELS.index(self.label)


def data_qubits_for(feature_length: int) -> int:
    """Qubits needed to amplitude-encode ``feature_length`` values."""
    return max(1, math.ceil(math.log2(feature_length)))


@dataclass(eq=False)
class Dataset:
    """
    Samples stored column-wise.

    ``features`` is ``(n, d)``, ``labels`` is ``(n, 2)`` one-hot and every
    ``metadata`` array has length ``n``. ``partitions`` maps a partition name to
    sample indices; partitions never overlap.
    """

    name: str
    features: np.ndarray
    labels: np.ndarray
    data_qubits: int
    partitions: Dict[str, np.ndarray] = field(default_factory=dict)
    metadata: Dict[str, np.ndarray] = field(default_factory=dict)
    provenance: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.features = np.atleast_2d(np.asarray(self.features))
        self.labels = np.asarray(self.labels, dtype=np.float64).reshape(-1, 2)
        n = self.features.shape[0]
        if self.labels.shape[0] != n:
            raise DatasetError(f"{n} feature rows but {self.labels.shape[0]} labels")
        if n and not (np.isin(self.labels, (0.0, 1.0)).all() and (self.labels.sum(axis=1) == 1).all()):
            raise DatasetError("Every label must be one-hot")
        if self.features.shape[1] > 2 ** self.data_qubits:
            raise DatasetError(
                f"{self.features.shape[1]} features do not fit in {self.data_qubits} data qubits"
            )
        for key, values in self.metadata.items():
            if len(values) != n:
                raise DatasetError(f"Metadata '{key}' has {len(values)} entries for {n} samples")

        seen = np.zeros(n, dtype=bool)
        partitions = {}
        for name, indices in self.partitions.items():
            indices = np.asarray(indices, dtype=np.int64)
            if indices.size and (indices.min() < 0 or indices.max() >= n):
                raise DatasetError(f"Partition '{name}' indexes outside 0..{n - 1}")
            if seen[indices].any() or np.unique(indices).size != indices.size:
                raise DatasetError(f"Partition '{name}' overlaps another partition")
            seen[indices] = True
            partitions[Partition(name).value] = indices
        self.partitions = partitions

    @classmethod
    def from_samples(
        cls,
        name: str,
        samples: Sequence[Sample],
        data_qubits: Optional[int] = None,
        provenance: Optional[Dict[str, Any]] = None,
    ) -> "Dataset":
        if not samples:
            raise DatasetError("Cannot build a dataset from zero samples")
        lengths = {s.features.shape[0] for s in samples}
        if len(lengths) != 1:
            raise DatasetError(f"Feature vectors differ in length: {sorted(lengths)}")
        keys = sorted(set().union(*(s.metadata for s in samples)))
        metadata = {key: np.array([s.metadata.get(key, np.nan) for s in samples]) for key in keys}
        return cls(
            name=name,
            features=np.stack([s.features for s in samples]),
            labels=np.array([s.label for s in samples], dtype=np.float64),
            data_qubits=data_qubits or data_qubits_for(lengths.pop()),
            metadata=metadata,
            provenance=dict(provenance or {}),
        )

    def __len__(self) -> int:
        return self.features.shape[0]

    @property
    def feature_length(self) -> int:
        return self.features.shape[1]

    @property
    def class_indices(self) -> np.ndarray:
        return self.labels[:, 1].astype(np.int64)

    def sample(self, index: int) -> Sample:
        return Sample(
            features=self.features[index],
            label=tuple(int(a) for a in self.labels[index]),
            metadata={key: values[index].item() for key, values in self.metadata.items()},
        )

    @property
    def samples(self) -> List[Sample]:
        return [self.sample(i) for i in range(len(self))]

    def __iter__(self) -> Iterator[Sample]:
        return (self.sample(i) for i in range(len(self)))

    def indices(self, name: Union[str, Partition]) -> np.ndarray:
        return self.partitions.get(Partition(name).value, np.zeros(0, dtype=np.int64))

    def partition_size(self, name: Union[str, Partition]) -> int:
        return int(self.indices(name).size)

    def partition(self, name: Union[str, Partition]) -> Tuple[np.ndarray, np.ndarray]:
        """Features and labels of one partition (empty arrays if it is unassigned)."""
        indices = self.indices(name)
        return self.features[indices], self.labels[indices]

    def class_counts(self, name: Optional[Union[str, Partition]] = None) -> Tuple[int, int]:
        """Samples per class, over the whole dataset or one partition."""
        classes = self.class_indices if name is None else self.class_indices[self.indices(name)]
        return int((classes == 0).sum()), int((classes == 1).sum())

    def with_partitions(self, partitions: Mapping[str, np.ndarray]) -> "Dataset":
        return Dataset(
            name=self.name,
            features=self.features,
            labels=self.labels,
            data_qubits=self.data_qubits,
            partitions=dict(partitions),
            metadata=self.metadata,
            provenance=self.provenance,
        )

    def summary(self) -> Dict[str, Any]:
        return {
            'name': self.name,
            'samples': len(self),
            'feature_length': self.feature_length,
            'data_qubits': self.data_qubits,
            'class_counts': list(self.class_counts()),
            'partitions': {
                name: {'size': int(idx.size), 'class_counts': list(self.class_counts(name))}
                for name, idx in self.partitions.items()
            },
        }


# ===== Splitting =====

def split(
    dataset: Dataset,
    counts: Union[Mapping[str, int], Sequence[int]],
    seed: Union[int, np.random.SeedSequence],
) -> Dataset:
    """
    Seeded shuffle followed by contiguous assignment to partitions.

    Args:
        dataset: Dataset to partition
        counts: Either ``(train, validation, test)`` or a mapping of partition name to size
        seed: Integer seed or seed sequence

    Returns:
        The same samples with new partitions

    Raises:
        InsufficientSamplesError: If the counts add up to more than the dataset holds
    """
    if not isinstance(counts, Mapping):
        counts = dict(zip((p.value for p in Partition), counts))
    counts = {Partition(name).value: int(count) for name, count in counts.items()}
    if any(count < 0 for count in counts.values()):
        raise DatasetError(f"Partition sizes must be non-negative: {counts}")
    total = sum(counts.values())
    if total > len(dataset):
        raise InsufficientSamplesError(f"Requested {total} samples but dataset '{dataset.name}' has {len(dataset)}")

    order = np.random.default_rng(seed).permutation(len(dataset))
    partitions = {}
    start = 0
    for partition in Partition:
        size = counts.get(partition.value, 0)
        partitions[partition.value] = np.sort(order[start:start + size])
        start += size

    logger.info(f"Split '{dataset.name}' into {counts} ({len(dataset) - total} samples unused)")
    return dataset.with_partitions(partitions)


def encode_dataset(
    dataset: Dataset,
    total_qubits: int,
    partition: Optional[Union[str, Partition]] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Amplitude-encode samples for a circuit with ``total_qubits`` qubits.

    Returns:
        Tuple of (states of shape ``(n, 2**total_qubits)``, one-hot labels)
    """
    if partition is None:
        features, labels = dataset.features, dataset.labels
    else:
        features, labels = dataset.partition(partition)
    if features.shape[0] == 0:
        return np.zeros((0, 2 ** total_qubits), dtype=np.complex128), labels
    return encode_batch(features, dataset.data_qubits, total_qubits), labels
