"""Cross-entropy loss on the readout qubit and its analytic gradient."""

from typing import Tuple

import numpy as np

from .circuit import CircuitDimensionError, OpKind, ParamCircuit
from .gates import SHIFT_RULES
from .statevector import (
    StateVector,
    apply_generator,
    apply_operation,
    forward_batch,
    readout_batch,
)


# Guards log(0) in the loss
LOG_CLAMP = 1e-12


def cross_entropy(probs: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Per-sample loss -a1 log(g1 + eps) - a2 log(g2 + eps)."""
    return -(labels * np.log(probs + LOG_CLAMP)).sum(axis=-1)


def _check_labels(labels: np.ndarray, batch: int) -> np.ndarray:
    labels = np.asarray(labels, dtype=np.float64)
    if labels.shape != (batch, 2):
        raise CircuitDimensionError(f"Expected labels of shape ({batch}, 2), got {labels.shape}")
    return labels


def loss_and_gradient(
    circuit: ParamCircuit,
    theta: np.ndarray,
    states: np.ndarray,
    labels: np.ndarray,
) -> Tuple[float, np.ndarray, np.ndarray]:
    """
    Mean loss over a batch and its exact gradient by a reverse sweep.

    With L depending on the final state psi through g_j = <psi|P_j|psi>, the
    sweep carries lambda = sum_j dL/dg_j P_j psi backwards alongside psi, and
    each angle contributes 2 Re <lambda|G psi> where G is the gate generator.

    Args:
        circuit: Compiled circuit
        theta: Angle vector
        states: Input states of shape ``(batch, 2**k)``
        labels: One-hot labels of shape ``(batch, 2)``

    Returns:
        Tuple of (mean loss, gradient, per-sample readout probabilities)
    """
    theta = np.asarray(theta, dtype=np.float64)
    psi = forward_batch(circuit, theta, states)
    batch = psi.shape[0]
    labels = _check_labels(labels, batch)

    probs = readout_batch(psi)
    losses = cross_entropy(probs, labels)

    weights = -labels / (probs + LOG_CLAMP) / batch
    lam = psi * weights.reshape((batch,) + (1,) * (circuit.k - 1) + (2,))

    grad = np.zeros(circuit.param_count)
    for op in reversed(circuit.operations):
        overlap = np.vdot(lam, apply_generator(psi, op))
        grad[op.slot] = 2.0 * overlap.real
        psi = apply_operation(psi, op, theta[op.slot], inverse=True)
        lam = apply_operation(lam, op, theta[op.slot], inverse=True)

    return float(losses.mean()), grad, probs


def gradient(
    circuit: ParamCircuit,
    theta: np.ndarray,
    state: StateVector,
    label: np.ndarray,
) -> np.ndarray:
    """Gradient of the loss for a single input state and one-hot label."""
    if state.k != circuit.k:
        raise CircuitDimensionError(f"{circuit.k}-qubit circuit cannot act on a {state.k}-qubit state")
    _, grad, _ = loss_and_gradient(
        circuit, theta, state.amplitudes[None, :], np.asarray(label, dtype=np.float64)[None, :]
    )
    return grad


def batch_loss(circuit: ParamCircuit, theta: np.ndarray, states: np.ndarray, labels: np.ndarray) -> float:
    """Mean loss without the gradient."""
    probs = readout_batch(forward_batch(circuit, theta, states))
    return float(cross_entropy(probs, _check_labels(labels, probs.shape[0])).mean())


def parameter_shift_gradient(
    circuit: ParamCircuit,
    theta: np.ndarray,
    states: np.ndarray,
    labels: np.ndarray,
) -> np.ndarray:
    """
    Reference gradient from shifted circuit evaluations.

    Readout probabilities are differentiated with the two-term rule for Rz/Rx
    and the four-term rule for CRx, then chained through the loss.
    """
    theta = np.asarray(theta, dtype=np.float64)
    probs = readout_batch(forward_batch(circuit, theta, states))
    labels = _check_labels(labels, probs.shape[0])
    weights = -labels / (probs + LOG_CLAMP) / probs.shape[0]

    grad = np.zeros(circuit.param_count)
    for op in circuit.operations:
        rule = SHIFT_RULES['four_term' if op.kind == OpKind.CRX else 'two_term']
        d_probs = np.zeros_like(probs)
        for shift, coeff in zip(rule['shifts'], rule['coeffs']):
            shifted = theta.copy()
            shifted[op.slot] += shift
            d_probs += coeff * readout_batch(forward_batch(circuit, shifted, states))
        grad[op.slot] = float((weights * d_probs).sum())
    return grad
