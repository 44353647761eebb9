"""
Exact statevector simulation.

Qubit 1 is the most significant bit of the basis index. Batched states are
stored as arrays of shape ``(batch, 2, ..., 2)`` so qubit ``q`` lives on axis
``q``. The readout qubit is the last one.
"""

import logging
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .circuit import CircuitDimensionError, OpKind, Operation, ParamCircuit, SimulationError
from .gates import GENERATOR_X, GENERATOR_Z, rx_matrix, rz_matrix


logger = logging.getLogger(__name__)

NORM_TOLERANCE = 1e-10


class EncodingError(SimulationError):
    """Exception raised when features cannot be amplitude-encoded."""
    pass


# ===== State Vector =====

@dataclass(frozen=True, eq=False)
class StateVector:
    """Unit-norm amplitudes over the ``2**k`` basis states."""

    amplitudes: np.ndarray
    k: int

    def __post_init__(self):
        amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if amplitudes.shape != (2 ** self.k,):
            raise CircuitDimensionError(f"{self.k}-qubit state needs {2 ** self.k} amplitudes, got {amplitudes.shape}")
        norm = float(np.vdot(amplitudes, amplitudes).real)
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise EncodingError(f"State is not normalized (squared norm {norm})")
        object.__setattr__(self, "amplitudes", amplitudes)

    @classmethod
    def basis(cls, k: int, index: int = 0) -> "StateVector":
        amplitudes = np.zeros(2 ** k, dtype=np.complex128)
        amplitudes[index] = 1.0
        return cls(amplitudes, k)


# ===== Amplitude Encoding =====

def encode_batch(features: np.ndarray, data_qubits: int, total_qubits: int) -> np.ndarray:
    """
    Amplitude-encode every row of ``features``.

    Rows are zero-padded to ``2**data_qubits``, L2-normalized and tensored with
    ``|0>`` on the remaining (readout) qubits.

    Returns:
        Complex array of shape ``(rows, 2**total_qubits)``

    Raises:
        EncodingError: On a zero row or when rows are longer than ``2**data_qubits``
    """
    features = np.atleast_2d(np.asarray(features))
    if total_qubits < data_qubits:
        raise EncodingError(f"Total qubits {total_qubits} fewer than data qubits {data_qubits}")
    width = 2 ** data_qubits
    if features.shape[1] > width:
        raise EncodingError(f"{features.shape[1]} features do not fit in {data_qubits} qubits")

    padded = np.zeros((features.shape[0], width), dtype=np.complex128)
    padded[:, : features.shape[1]] = features
    norms = np.linalg.norm(padded, axis=1)
    zero_rows = np.flatnonzero(norms == 0)
    if zero_rows.size:
        raise EncodingError(f"Feature vector {int(zero_rows[0])} is all zeros")
    padded /= norms[:, None]

    stride = 2 ** (total_qubits - data_qubits)
    states = np.zeros((features.shape[0], width * stride), dtype=np.complex128)
    states[:, ::stride] = padded
    return states


def amplitude_encode(features: Sequence[float], data_qubits: int, total_qubits: int) -> StateVector:
    """Amplitude-encode one feature vector; the readout qubit(s) start in ``|0>``."""
    return StateVector(encode_batch(np.asarray(features)[None, :], data_qubits, total_qubits)[0], total_qubits)


# ===== Kernels =====

def _apply_matrix(psi: np.ndarray, matrix: np.ndarray, axis: int) -> np.ndarray:
    out = np.tensordot(matrix, psi, axes=([1], [axis]))
    return np.moveaxis(out, 0, axis)


def _control_slice(ndim: int, control_axis: int) -> Tuple[slice, ...]:
    index = [slice(None)] * ndim
    index[control_axis] = 1
    return tuple(index)


def _apply_controlled(psi: np.ndarray, matrix: np.ndarray, control: int, target: int) -> np.ndarray:
    index = _control_slice(psi.ndim, control)
    sub_axis = target - 1 if target > control else target
    out = psi.copy()
    out[index] = _apply_matrix(psi[index], matrix, sub_axis)
    return out


def apply_operation(psi: np.ndarray, op: Operation, angle: float, inverse: bool = False) -> np.ndarray:
    """Apply one elementary gate (or its inverse) to a batched state."""
    phi = -angle if inverse else angle
    if op.kind == OpKind.RZ:
        return _apply_matrix(psi, rz_matrix(phi), op.qubits[0])
    if op.kind == OpKind.RX:
        return _apply_matrix(psi, rx_matrix(phi), op.qubits[0])
    control, target = op.qubits
    return _apply_controlled(psi, rx_matrix(phi), control, target)


def apply_generator(psi: np.ndarray, op: Operation) -> np.ndarray:
    """Apply the generator G of ``op`` (dU/dphi = G U) to a batched state."""
    if op.kind == OpKind.RZ:
        return _apply_matrix(psi, GENERATOR_Z, op.qubits[0])
    if op.kind == OpKind.RX:
        return _apply_matrix(psi, GENERATOR_X, op.qubits[0])
    control, target = op.qubits
    index = _control_slice(psi.ndim, control)
    sub_axis = target - 1 if target > control else target
    out = np.zeros_like(psi)
    out[index] = _apply_matrix(psi[index], GENERATOR_X, sub_axis)
    return out


def _check_inputs(circuit: ParamCircuit, theta: np.ndarray, states: np.ndarray) -> None:
    if theta.shape != (circuit.param_count,):
        raise CircuitDimensionError(f"Circuit has {circuit.param_count} parameters, got {theta.shape}")
    if states.ndim != 2 or states.shape[1] != 2 ** circuit.k:
        raise CircuitDimensionError(f"{circuit.k}-qubit circuit cannot act on states of shape {states.shape}")


def forward_batch(circuit: ParamCircuit, theta: np.ndarray, states: np.ndarray) -> np.ndarray:
    """
    Run the circuit on a stack of states.

    Args:
        circuit: Compiled circuit
        theta: Angle vector of length ``param_count``
        states: Array of shape ``(batch, 2**k)``

    Returns:
        Output states as a ``(batch, 2, ..., 2)`` tensor
    """
    theta = np.asarray(theta, dtype=np.float64)
    states = np.asarray(states, dtype=np.complex128)
    _check_inputs(circuit, theta, states)
    psi = states.reshape((states.shape[0],) + (2,) * circuit.k)
    for op in circuit.operations:
        psi = apply_operation(psi, op, theta[op.slot])
    return psi


def readout_batch(psi: np.ndarray) -> np.ndarray:
    """(g1, g2) per sample: probabilities of measuring the last qubit as 0 and 1."""
    probabilities = np.abs(psi) ** 2
    return probabilities.sum(axis=tuple(range(1, psi.ndim - 1)))


def apply_circuit(circuit: ParamCircuit, theta: np.ndarray, state: StateVector) -> StateVector:
    """
    Apply the circuit to one state.

    Raises:
        CircuitDimensionError: If the state or angle vector does not fit the circuit
    """
    if state.k != circuit.k:
        raise CircuitDimensionError(f"{circuit.k}-qubit circuit cannot act on a {state.k}-qubit state")
    psi = forward_batch(circuit, theta, state.amplitudes[None, :])
    return StateVector(psi.reshape(-1), circuit.k)


def readout_probs(state: StateVector, qubit: int) -> Tuple[float, float]:
    """
    Probabilities of measuring ``qubit`` (1-based) as 0 and as 1.

    Raises:
        CircuitDimensionError: If the qubit index is out of range
    """
    if not 1 <= qubit <= state.k:
        raise CircuitDimensionError(f"Qubit {qubit} out of range 1..{state.k}")
    psi = state.amplitudes.reshape((2,) * state.k)
    probabilities = np.abs(psi) ** 2
    g1 = float(np.take(probabilities, 0, axis=qubit - 1).sum())
    g2 = float(np.take(probabilities, 1, axis=qubit - 1).sum())
    return g1, g2
