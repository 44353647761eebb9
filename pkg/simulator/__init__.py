"""Statevector simulation of block circuits with analytic gradients."""

from .circuit import (
    CircuitDimensionError,
    OpKind,
    Operation,
    ParamCircuit,
    SimulationError,
    compile_blocks,
    compile_path,
)
from .gates import SHIFT_RULES, crx_matrix, rx_matrix, rz_matrix
from .statevector import (
    NORM_TOLERANCE,
    EncodingError,
    StateVector,
    amplitude_encode,
    apply_circuit,
    encode_batch,
    forward_batch,
    readout_batch,
    readout_probs,
)
from .gradient import (
    LOG_CLAMP,
    batch_loss,
    cross_entropy,
    gradient,
    loss_and_gradient,
    parameter_shift_gradient,
)

__all__ = [
    'CircuitDimensionError',
    'OpKind',
    'Operation',
    'ParamCircuit',
    'SimulationError',
    'compile_blocks',
    'compile_path',
    'SHIFT_RULES',
    'crx_matrix',
    'rx_matrix',
    'rz_matrix',
    'NORM_TOLERANCE',
    'EncodingError',
    'StateVector',
    'amplitude_encode',
    'apply_circuit',
    'encode_batch',
    'forward_batch',
    'readout_batch',
    'readout_probs',
    'LOG_CLAMP',
    'batch_loss',
    'cross_entropy',
    'gradient',
    'loss_and_gradient',
    'parameter_shift_gradient',
]
