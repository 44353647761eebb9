"""Benchmark datasets: MNIST digits, WDBC cancer diagnoses and cluster-Ising ground states."""

from .dataset import (
    CLASS_LABELS,
    Dataset,
    DatasetError,
    InsufficientSamplesError,
    Partition,
    Sample,
    data_qubits_for,
    encode_dataset,
    one_hot,
    split,
)
from .mnist import IdxFormatError, downscale, load_mnist, read_idx
from .wdbc import CsvParseError, UnknownDiagnosisError, load_wdbc, min_max_normalize
from .cluster_ising import (
    ClusterIsingSpec,
    gen_cluster_ising,
    ground_energies,
    ground_state,
    hamiltonian,
    hamiltonian_terms,
    lambda_grid,
)
from .cache import (
    CacheFormatError,
    ProvenanceRecord,
    load_dataset,
    load_provenance,
    provenance_path,
    save_dataset,
)

__all__ = [
    'CLASS_LABELS',
    'Dataset',
    'DatasetError',
    'InsufficientSamplesError',
    'Partition',
    'Sample',
    'data_qubits_for',
    'encode_dataset',
    'one_hot',
    'split',
    'IdxFormatError',
    'downscale',
    'load_mnist',
    'read_idx',
    'CsvParseError',
    'UnknownDiagnosisError',
    'load_wdbc',
    'min_max_normalize',
    'ClusterIsingSpec',
    'gen_cluster_ising',
    'ground_energies',
    'ground_state',
    'hamiltonian',
    'hamiltonian_terms',
    'lambda_grid',
    'CacheFormatError',
    'ProvenanceRecord',
    'load_dataset',
    'load_provenance',
    'provenance_path',
    'save_dataset',
]
