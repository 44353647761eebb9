"""Wisconsin diagnostic breast cancer (WDBC) CSV ingestion."""

import logging
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd

from utils.checksum import calculate_checksum

from .dataset import CLASS_LABELS, Dataset, DatasetError


logger = logging.getLogger(__name__)

WDBC_COLUMNS = 32
FEATURE_COUNT = 30
# 30 features zero-padded to 64 amplitudes; with the readout qubit the circuit spans 7 qubits
WDBC_DATA_QUBITS = 6
# Malignant is read out as g1
DIAGNOSIS_LABELS = {'M': CLASS_LABELS[0], 'B': CLASS_LABELS[1]}


class CsvParseError(DatasetError):
    """Exception raised for malformed rows; the message carries the line number."""
    pass


class UnknownDiagnosisError(DatasetError):
    """Exception raised for a diagnosis other than M or B."""
    pass


def min_max_normalize(values: np.ndarray) -> tuple:
    """
    Scale each column to [0, 1]; columns with zero range become 0.

    Returns:
        Tuple of (normalized values, column minima, column maxima)
    """
    lows = values.min(axis=0)
    highs = values.max(axis=0)
    spans = highs - lows
    normalized = np.divide(
        values - lows,
        spans,
        out=np.zeros_like(values, dtype=np.float64),
        where=spans > 0,
    )
    return normalized, lows, highs


def load_wdbc(csv_file: Union[str, Path]) -> Dataset:
    """
    Load the WDBC CSV (id, diagnosis, 30 features; an optional header row is skipped).

    Raises:
        FileNotFoundError: If the file does not exist
        CsvParseError: On a malformed row (reported with its 1-based line number)
        UnknownDiagnosisError: On a diagnosis other than M or B
    """
    csv_file = Path(csv_file)
    if not csv_file.exists():
        raise FileNotFoundError(f"WDBC file not found: {csv_file}")

    try:
        frame = pd.read_csv(csv_file, header=None, dtype=str, skipinitialspace=True)
    except pd.errors.EmptyDataError as e:
        raise CsvParseError(f"{csv_file} is empty") from e
    except pd.errors.ParserError as e:
        raise CsvParseError(f"Malformed WDBC file {csv_file}: {e}") from e

    if frame.shape[1] != WDBC_COLUMNS:
        raise CsvParseError(f"Expected {WDBC_COLUMNS} columns in {csv_file}, got {frame.shape[1]}")
    if str(frame.iloc[0, 1]).strip().lower() == 'diagnosis':
        frame = frame.iloc[1:]
    if frame.empty:
        raise CsvParseError(f"{csv_file} has no data rows")

    lines = frame.index.to_numpy() + 1
    incomplete = frame.isna().any(axis=1).to_numpy()
    if incomplete.any():
        raise CsvParseError(f"Line {lines[incomplete.argmax()]}: expected {WDBC_COLUMNS} fields")

    diagnosis = frame[1].str.strip().str.upper()
    unknown = ~diagnosis.isin(list(DIAGNOSIS_LABELS)).to_numpy()
    if unknown.any():
        row = int(unknown.argmax())
        raise UnknownDiagnosisError(f"Line {lines[row]}: unknown diagnosis '{frame.iloc[row, 1]}'")

    numeric = frame.iloc[:, 2:].apply(pd.to_numeric, errors='coerce')
    invalid = numeric.isna().any(axis=1).to_numpy()
    if invalid.any():
        raise CsvParseError(f"Line {lines[invalid.argmax()]}: non-numeric feature value")

    features, lows, highs = min_max_normalize(numeric.to_numpy(dtype=np.float64))
    labels = np.array([DIAGNOSIS_LABELS[d] for d in diagnosis], dtype=np.float64)
    ids = pd.to_numeric(frame[0], errors='coerce').fillna(-1).astype(np.int64).to_numpy()

    logger.info(f"Loaded {len(features)} WDBC samples from {csv_file}")
    return Dataset(
        name="cancer",
        features=features,
        labels=labels,
        data_qubits=WDBC_DATA_QUBITS,
        metadata={'id': ids},
        provenance={
            'source': 'wdbc',
            'file_md5': calculate_checksum(csv_file),
            'feature_min': lows.tolist(),
            'feature_max': highs.tolist(),
        },
    )
