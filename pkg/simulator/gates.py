"""Gate matrices, generators and shift rules for Rz, Rx and CRx."""

import math

import numpy as np


PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)

# dU/dphi = G U for U = exp(-i phi P / 2)
GENERATOR_X = -0.5j * PAULI_X
GENERATOR_Z = -0.5j * PAULI_Z


def rz_matrix(phi: float) -> np.ndarray:
    """Rz(phi) = diag(exp(-i phi/2), exp(i phi/2))."""
    phase = np.exp(-0.5j * phi)
    return np.array([[phase, 0], [0, np.conj(phase)]], dtype=np.complex128)


def rx_matrix(phi: float) -> np.ndarray:
    """Rx(phi) = cos(phi/2) I - i sin(phi/2) X."""
    c = math.cos(phi / 2)
    s = math.sin(phi / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)


def crx_matrix(phi: float) -> np.ndarray:
    """Controlled Rx on two qubits, control first (most significant)."""
    matrix = np.eye(4, dtype=np.complex128)
    matrix[2:, 2:] = rx_matrix(phi)
    return matrix


# Two-term rule for exp(-i phi P/2); four-term rule for controlled rotations
SHIFT_RULES = {
    'two_term': {
        'shifts': [math.pi / 2, -math.pi / 2],
        'coeffs': [0.5, -0.5],
    },
    'four_term': {
        'shifts': [math.pi / 2, -math.pi / 2, 3 * math.pi / 2, -3 * math.pi / 2],
        'coeffs': [
            (math.sqrt(2) + 1) / (4 * math.sqrt(2)),
            -(math.sqrt(2) + 1) / (4 * math.sqrt(2)),
            -(math.sqrt(2) - 1) / (4 * math.sqrt(2)),
            (math.sqrt(2) - 1) / (4 * math.sqrt(2)),
        ],
    },
}
