"""Training of compiled circuits with Adam, and fitness scoring."""

import logging
import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from dataset import Dataset, Partition, encode_dataset
from graph import GraphError, Path as BlockPath
from simulator import (
    CircuitDimensionError,
    ParamCircuit,
    batch_loss,
    cross_entropy,
    forward_batch,
    loss_and_gradient,
    readout_batch,
)


logger = logging.getLogger(__name__)

MODEL_FORMAT_VERSION = 1
HISTORY_COLUMNS = ['epoch', 'train_loss', 'train_acc', 'val_loss', 'val_acc']


# ===== Exceptions =====

class TrainingError(Exception):
    """Base exception for training errors."""
    pass


class NonFiniteLossError(TrainingError):
    """Exception raised when the loss or gradient stops being finite."""
    pass


class EmptyPartitionError(TrainingError):
    """Exception raised when fitness is requested on an empty partition."""
    pass


# ===== Configuration =====

class InitPolicy(str, Enum):
    """How initial angles are drawn."""
    RANDOM = "random"      # fresh stream per training run
    FIXED = "fixed"        # prefix of one global stream
    INHERIT = "inherit"    # parent angles, new gates at zero


@dataclass(frozen=True)
class TrainConfig:
    """Optimizer settings; ``epochs`` is the history length, ``max_steps`` caps updates."""

    learning_rate: float = 0.0015
    batch_size: int = 30
    epochs: int = 100
    max_steps: Optional[int] = None
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    init_policy: InitPolicy = InitPolicy.FIXED
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "init_policy", InitPolicy(self.init_policy))
        if self.learning_rate <= 0:
            raise TrainingError(f"Learning rate must be positive, got {self.learning_rate}")
        if self.batch_size < 1:
            raise TrainingError(f"Batch size must be at least 1, got {self.batch_size}")
        if self.epochs < 0:
            raise TrainingError(f"Epoch count must be non-negative, got {self.epochs}")
        if self.max_steps is not None and self.max_steps < 0:
            raise TrainingError(f"max_steps must be non-negative, got {self.max_steps}")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise TrainingError("Adam betas must lie in [0, 1)")

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['init_policy'] = self.init_policy.value
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TrainConfig":
        return cls(**data)


# ===== Results =====

@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    train_loss: float
    train_acc: float
    val_loss: float
    val_acc: float


@dataclass(eq=False)
class TrainedModel:
    """A circuit with its trained angles and per-epoch history."""

    circuit: ParamCircuit
    theta: np.ndarray
    history: List[EpochRecord] = field(default_factory=list)
    initial_theta: Optional[np.ndarray] = None
    steps: int = 0

    @property
    def final_train_loss(self) -> float:
        return self.history[-1].train_loss if self.history else math.nan


@dataclass(frozen=True)
class FitnessReport:
    """Accuracy on one partition."""

    fitness: float
    partition: str
    correct: int
    total: int


@dataclass(eq=False)
class TrainingData:
    """Encoded states and labels per partition, shared across training runs."""

    total_qubits: int
    states: Dict[str, np.ndarray]
    labels: Dict[str, np.ndarray]

    @classmethod
    def from_dataset(cls, dataset: Dataset, total_qubits: int) -> "TrainingData":
        states, labels = {}, {}
        for partition in Partition:
            states[partition.value], labels[partition.value] = encode_dataset(
                dataset, total_qubits, partition
            )
        return cls(total_qubits=total_qubits, states=states, labels=labels)

    def partition(self, name: Union[str, Partition]) -> Tuple[np.ndarray, np.ndarray]:
        key = Partition(name).value
        return self.states[key], self.labels[key]

    def size(self, name: Union[str, Partition]) -> int:
        return int(self.states[Partition(name).value].shape[0])


def _as_training_data(data: Union[Dataset, TrainingData], circuit: ParamCircuit) -> TrainingData:
    if isinstance(data, Dataset):
        if data.data_qubits + 1 != circuit.k:
            raise CircuitDimensionError(
                f"{circuit.k}-qubit circuit does not fit {data.data_qubits} data qubits plus one readout"
            )
        return TrainingData.from_dataset(data, circuit.k)
    if data.total_qubits != circuit.k:
        raise CircuitDimensionError(f"{circuit.k}-qubit circuit cannot train on {data.total_qubits}-qubit states")
    return data


# ===== Loss and Prediction =====

def loss(g1: float, g2: float, a: Tuple[int, int]) -> float:
    """Cross-entropy -a1 log(g1 + eps) - a2 log(g2 + eps)."""
    return float(cross_entropy(np.array([g1, g2]), np.asarray(a, dtype=np.float64)))


def predict(g1: float, g2: float) -> int:
    """Class 1 if g1 >= g2 else class 2."""
    return 1 if g1 >= g2 else 2


def predict_batch(probs: np.ndarray) -> np.ndarray:
    """Zero-based class per row; ties go to class 0."""
    return (probs[:, 1] > probs[:, 0]).astype(np.int64)


def accuracy(probs: np.ndarray, labels: np.ndarray) -> float:
    return float((predict_batch(probs) == labels[:, 1].astype(np.int64)).mean())


def evaluate(
    circuit: ParamCircuit,
    theta: np.ndarray,
    states: np.ndarray,
    labels: np.ndarray,
) -> Tuple[float, float]:
    """Mean loss and accuracy; both NaN for an empty batch."""
    if states.shape[0] == 0:
        return math.nan, math.nan
    probs = readout_batch(forward_batch(circuit, theta, states))
    return float(cross_entropy(probs, labels).mean()), accuracy(probs, labels)


# ===== Initialization =====

def initial_angles(
    circuit: ParamCircuit,
    config: TrainConfig,
    rng: Optional[np.random.Generator] = None,
    parent_theta: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    Initial angles according to ``config.init_policy``.

    ``RANDOM`` draws from ``rng`` (or a stream seeded by ``config.seed``);
    ``FIXED`` takes the prefix of one stream seeded by ``config.seed`` so a
    parent and its offspring share leading angles; ``INHERIT`` copies
    ``parent_theta`` and starts new gates at zero, falling back to ``FIXED``
    without a parent.
    """
    n = circuit.param_count
    policy = config.init_policy
    if policy == InitPolicy.INHERIT and parent_theta is not None:
        parent_theta = np.asarray(parent_theta, dtype=np.float64)
        if parent_theta.size > n:
            raise CircuitDimensionError(f"Parent has {parent_theta.size} angles, offspring only {n}")
        theta = np.zeros(n)
        theta[: parent_theta.size] = parent_theta
        return theta
    if policy == InitPolicy.RANDOM and rng is not None:
        return rng.random(n) * 2 * np.pi
    return np.random.default_rng(config.seed).random(n) * 2 * np.pi


# ===== Optimizer =====

class Adam:
    """Adam update on a flat parameter vector."""

    def __init__(self, size: int, config: TrainConfig):
        self.config = config
        self.m = np.zeros(size)
        self.v = np.zeros(size)
        self.t = 0

    def step(self, theta: np.ndarray, grad: np.ndarray) -> np.ndarray:
        cfg = self.config
        self.t += 1
        self.m = cfg.beta1 * self.m + (1 - cfg.beta1) * grad
        self.v = cfg.beta2 * self.v + (1 - cfg.beta2) * grad ** 2
        m_hat = self.m / (1 - cfg.beta1 ** self.t)
        v_hat = self.v / (1 - cfg.beta2 ** self.t)
        return theta - cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.epsilon)


# ===== Training =====

def train(
    circuit: ParamCircuit,
    data: Union[Dataset, TrainingData],
    config: TrainConfig,
    theta0: Optional[np.ndarray] = None,
    rng: Optional[np.random.Generator] = None,
) -> TrainedModel:
    """
    Mini-batch Adam on the training partition.

    Args:
        circuit: Compiled circuit with ``data_qubits + 1`` qubits
        data: Dataset or pre-encoded training data
        config: Training configuration
        theta0: Initial angles; drawn per ``config.init_policy`` when omitted
        rng: Stream for batch shuffling (and random initialization)

    Returns:
        The trained model; ``theta`` holds the angles after the final epoch

    Raises:
        CircuitDimensionError: If the circuit does not fit the data
        NonFiniteLossError: If a batch loss or gradient is not finite
    """
    data = _as_training_data(data, circuit)
    rng = rng if rng is not None else np.random.default_rng(config.seed)
    theta = initial_angles(circuit, config, rng) if theta0 is None else np.array(theta0, dtype=np.float64)
    if theta.shape != (circuit.param_count,):
        raise CircuitDimensionError(f"Circuit has {circuit.param_count} parameters, got {theta.shape}")
    initial_theta = theta.copy()

    train_states, train_labels = data.partition(Partition.TRAIN)
    val_states, val_labels = data.partition(Partition.VALIDATION)
    n_train = train_states.shape[0]
    if n_train == 0 and config.epochs > 0:
        raise EmptyPartitionError("Training partition is empty")

    optimizer = Adam(circuit.param_count, config)
    history: List[EpochRecord] = []
    steps = 0
    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(n_train)
        for batch, start in enumerate(range(0, n_train, config.batch_size)):
            if config.max_steps is not None and steps >= config.max_steps:
                break
            idx = order[start:start + config.batch_size]
            batch_value, grad, _ = loss_and_gradient(circuit, theta, train_states[idx], train_labels[idx])
            if not (math.isfinite(batch_value) and np.all(np.isfinite(grad))):
                raise NonFiniteLossError(f"Non-finite loss at epoch {epoch}, batch {batch}")
            theta = optimizer.step(theta, grad)
            steps += 1

        train_loss, train_acc = evaluate(circuit, theta, train_states, train_labels)
        val_loss, val_acc = evaluate(circuit, theta, val_states, val_labels)
        history.append(EpochRecord(epoch, train_loss, train_acc, val_loss, val_acc))
        logger.debug(
            f"Epoch {epoch}: train_loss={train_loss:.4f} train_acc={train_acc:.4f} "
            f"val_loss={val_loss:.4f} val_acc={val_acc:.4f}"
        )

    return TrainedModel(circuit=circuit, theta=theta, history=history, initial_theta=initial_theta, steps=steps)


def fitness(
    model: TrainedModel,
    data: Union[Dataset, TrainingData],
    partition: Union[str, Partition] = Partition.VALIDATION,
) -> FitnessReport:
    """
    Accuracy of ``model`` on one partition.

    Raises:
        EmptyPartitionError: If the partition has no samples
    """
    data = _as_training_data(data, model.circuit)
    states, labels = data.partition(partition)
    name = Partition(partition).value
    if states.shape[0] == 0:
        raise EmptyPartitionError(f"Partition '{name}' is empty")
    probs = readout_batch(forward_batch(model.circuit, model.theta, states))
    correct = int((predict_batch(probs) == labels[:, 1].astype(np.int64)).sum())
    return FitnessReport(
        fitness=correct / states.shape[0],
        partition=name,
        correct=correct,
        total=int(states.shape[0]),
    )


def training_loss(model: TrainedModel, data: TrainingData, theta: Optional[np.ndarray] = None) -> float:
    """Mean training-partition loss at ``theta`` (default: the trained angles)."""
    states, labels = data.partition(Partition.TRAIN)
    return batch_loss(model.circuit, model.theta if theta is None else theta, states, labels)


# ===== Export =====

def history_frame(history: List[EpochRecord]) -> pd.DataFrame:
    return pd.DataFrame([asdict(record) for record in history], columns=HISTORY_COLUMNS)


def history_to_csv(history: List[EpochRecord], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    history_frame(history).to_csv(path, index=False, float_format="%.10g")
    return path


def model_to_text(model: TrainedModel) -> str:
    """Versioned text form: version line, path line, angle line."""
    path = BlockPath(model.circuit.source) if model.circuit.source else None
    angles = " ".join(repr(float(a)) for a in model.theta)
    return (
        f"# mqne-model v{MODEL_FORMAT_VERSION} qubits={model.circuit.k}\n"
        f"path: {path if path is not None else ''}\n"
        f"theta: {angles}\n"
    )


def model_from_text(text: str) -> Tuple[Tuple[int, ...], np.ndarray]:
    """
    Parse ``model_to_text`` output.

    Returns:
        Tuple of (block indices, angles)

    Raises:
        TrainingError: On an unknown version or malformed lines
    """
    lines = [line.strip() for line in text.strip().splitlines()]
    if len(lines) != 3 or not lines[0].startswith(f"# mqne-model v{MODEL_FORMAT_VERSION}"):
        raise TrainingError("Unrecognized model file")
    try:
        path_text = lines[1].split(":", 1)[1].strip()
        nodes = BlockPath.parse(path_text).nodes if path_text else ()
        angle_text = lines[2].split(":", 1)[1].split()
        theta = np.array([float(a) for a in angle_text], dtype=np.float64)
    except (IndexError, ValueError, GraphError) as e:
        raise TrainingError(f"Malformed model file: {e}") from e
    return nodes, theta


def save_model(model: TrainedModel, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(model_to_text(model))
    return path

