"""
Neuroevolution over block-graph paths.

Generation 1 holds random paths of length ``l``. Each later generation takes
the ``t`` fittest paths of the previous one and appends ``n`` independent
random segments of length ``l'`` to each. The loop stops once the best
fitness of a generation reaches ``f_c`` or after ``g_c`` generations.
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from dataset import Dataset, Partition
from graph import BlockGraph, GraphError, Path, StartPolicy, extend_path, random_path
from library import BlockLibrary
from simulator import SimulationError, compile_blocks

from .seeding import stream_rng
from .trainer import (
    InitPolicy,
    TrainConfig,
    TrainedModel,
    TrainingData,
    TrainingError,
    fitness,
    initial_angles,
    train,
)


logger = logging.getLogger(__name__)

MAX_PATH_ATTEMPTS = 100


# ===== Exceptions =====

class EvolutionError(Exception):
    """Base exception for evolutionary search errors."""
    pass


# ===== Records =====

class RunOutcome(str, Enum):
    THRESHOLD_REACHED = "threshold_reached"
    BUDGET_EXHAUSTED = "budget_exhausted"


@dataclass(frozen=True)
class Individual:
    """One evaluated circuit; ``parent`` is the survivor's index in the previous generation."""

    generation: int
    index: int
    parent: Optional[int]
    blocks: Tuple[int, ...]
    param_count: int
    rot_count: int
    crx_count: int
    fitness: float
    test_fitness: Optional[float] = None
    final_train_loss: Optional[float] = None
    failed: bool = False
    error: str = ""

    @property
    def length(self) -> int:
        return len(self.blocks)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['length'] = self.length
        data['path'] = " -> ".join(str(b) for b in self.blocks)
        del data['blocks']
        return data


@dataclass
class GenerationLog:
    """Every individual of one generation; ``wall_time`` is for logging only."""

    generation: int
    individuals: List[Individual]
    best_fitness: float
    best_so_far: float
    wall_time: float = 0.0

    @property
    def population(self) -> int:
        return len(self.individuals)

    @property
    def mean_fitness(self) -> float:
        return float(np.mean([ind.fitness for ind in self.individuals]))

    @property
    def best(self) -> Individual:
        return max(self.individuals, key=lambda ind: (ind.fitness, -ind.index))


@dataclass
class EvolutionResult:
    best_model: TrainedModel
    best_individual: Individual
    logs: List[GenerationLog] = field(default_factory=list)
    outcome: RunOutcome = RunOutcome.BUDGET_EXHAUSTED

    @property
    def best_path(self) -> Path:
        return Path(self.best_individual.blocks)

    @property
    def evaluated(self) -> int:
        return sum(log.population for log in self.logs)


# ===== Configuration =====

@dataclass(frozen=True)
class MqneConfig:
    """
    Search hyperparameters.

    ``offspring`` (n) is the first population and the number of segments grown
    from each survivor; ``survivors`` (t) is the selection size. Schedules
    override both per generation (entry ``i`` applies to generation ``i + 1``).
    """

    offspring: int = 5
    survivors: int = 1
    initial_length: int = 5
    segment_length: int = 2
    fitness_threshold: float = 0.96
    max_generations: int = 10
    start_policy: StartPolicy = field(default_factory=StartPolicy)
    train: TrainConfig = field(default_factory=TrainConfig)
    seed: int = 0
    population_schedule: Tuple[int, ...] = ()
    survivor_schedule: Tuple[int, ...] = ()
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "population_schedule", tuple(self.population_schedule))
        object.__setattr__(self, "survivor_schedule", tuple(self.survivor_schedule))
        if self.initial_length < 1 or self.segment_length < 1:
            raise EvolutionError("Initial and segment lengths must be at least 1")
        if not 0 <= self.fitness_threshold <= 1:
            raise EvolutionError(f"Fitness threshold must lie in [0, 1], got {self.fitness_threshold}")
        if self.max_generations < 1:
            raise EvolutionError(f"max_generations must be at least 1, got {self.max_generations}")
        if self.workers < 1:
            raise EvolutionError(f"workers must be at least 1, got {self.workers}")
        for generation in range(1, self.max_generations + 1):
            n, t = self.offspring_at(generation), self.survivors_at(generation)
            if not 1 <= t < n:
                raise EvolutionError(f"Generation {generation}: need 1 <= t < n, got t={t}, n={n}")

    def offspring_at(self, generation: int) -> int:
        if generation <= len(self.population_schedule):
            return self.population_schedule[generation - 1]
        return self.offspring

    def survivors_at(self, generation: int) -> int:
        if generation <= len(self.survivor_schedule):
            return self.survivor_schedule[generation - 1]
        return self.survivors

    def expected_length(self, generation: int) -> int:
        return self.initial_length + (generation - 1) * self.segment_length

    def to_dict(self) -> Dict[str, Any]:
        return {
            'offspring': self.offspring,
            'survivors': self.survivors,
            'initial_length': self.initial_length,
            'segment_length': self.segment_length,
            'fitness_threshold': self.fitness_threshold,
            'max_generations': self.max_generations,
            'start_policy': {'variant': self.start_policy.variant.value, 'index': self.start_policy.index},
            'train': self.train.to_dict(),
            'seed': self.seed,
            'population_schedule': list(self.population_schedule),
            'survivor_schedule': list(self.survivor_schedule),
        }


# ===== Evaluation =====

@dataclass(frozen=True, eq=False)
class Candidate:
    """A circuit waiting to be trained."""

    index: int
    blocks: Tuple[int, ...]
    parent: Optional[int] = None
    parent_theta: Optional[np.ndarray] = None


def evaluate_candidate(
    candidate: Candidate,
    generation: int,
    library: BlockLibrary,
    data: TrainingData,
    train_config: TrainConfig,
    master_seed: int,
) -> Tuple[Individual, Optional[TrainedModel]]:
    """
    Compile, train and score one candidate.

    Training and simulation errors do not propagate: the individual is marked
    failed with fitness 0.
    """
    circuit = compile_blocks(candidate.blocks, library)
    rot_count, crx_count = circuit.gate_counts()
    common = dict(
        generation=generation,
        index=candidate.index,
        parent=candidate.parent,
        blocks=tuple(candidate.blocks),
        param_count=circuit.param_count,
        rot_count=rot_count,
        crx_count=crx_count,
    )
    try:
        theta0 = initial_angles(
            circuit,
            train_config,
            rng=stream_rng(master_seed, 'theta_init', generation, candidate.index),
            parent_theta=candidate.parent_theta,
        )
        shuffle_rng = stream_rng(master_seed, 'batch_shuffle', generation, candidate.index)
        model = train(circuit, data, train_config, theta0=theta0, rng=shuffle_rng)
        score = fitness(model, data, Partition.VALIDATION).fitness
        test_score = fitness(model, data, Partition.TEST).fitness if data.size(Partition.TEST) else None
    except (TrainingError, SimulationError) as e:
        logger.warning(f"Generation {generation}, individual {candidate.index} failed: {e}")
        return Individual(**common, fitness=0.0, failed=True, error=str(e)), None

    logger.debug(
        f"Generation {generation}, individual {candidate.index}: fitness={score:.4f} "
        f"params={circuit.param_count} path={Path(candidate.blocks) if candidate.blocks else '()'}"
    )
    return Individual(
        **common,
        fitness=float(score),
        test_fitness=test_score,
        final_train_loss=model.final_train_loss,
    ), model


def evaluate_generation(
    candidates: Sequence[Candidate],
    generation: int,
    library: BlockLibrary,
    data: TrainingData,
    train_config: TrainConfig,
    master_seed: int,
    workers: int = 1,
) -> List[Tuple[Individual, Optional[TrainedModel]]]:
    """Evaluate candidates, concurrently when ``workers > 1``; results keep candidate order."""

    def run(candidate: Candidate):
        return evaluate_candidate(candidate, generation, library, data, train_config, master_seed)

    if workers > 1 and len(candidates) > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            return list(executor.map(run, candidates))
    return [run(candidate) for candidate in candidates]


def select_survivors(individuals: Sequence[Individual], count: int) -> List[Individual]:
    """The ``count`` fittest individuals; ties go to the lower index."""
    return sorted(individuals, key=lambda ind: (-ind.fitness, ind.index))[:count]


class BestTracker:
    """Best successfully trained individual seen so far (earliest wins ties)."""

    def __init__(self):
        self.individual: Optional[Individual] = None
        self.model: Optional[TrainedModel] = None

    @property
    def fitness(self) -> float:
        return self.individual.fitness if self.individual is not None else 0.0

    def update(self, results: Sequence[Tuple[Individual, Optional[TrainedModel]]]) -> None:
        for individual, model in results:
            if model is None:
                continue
            if self.individual is None or individual.fitness > self.individual.fitness:
                self.individual, self.model = individual, model

    def result(self, logs: List[GenerationLog], outcome: RunOutcome) -> EvolutionResult:
        if self.model is None:
            raise EvolutionError("Every individual failed to train")
        return EvolutionResult(self.model, self.individual, logs, outcome)


def make_log(
    generation: int,
    results: Sequence[Tuple[Individual, Optional[TrainedModel]]],
    tracker: BestTracker,
    started: float,
) -> GenerationLog:
    individuals = [individual for individual, _ in results]
    best = max(ind.fitness for ind in individuals)
    log = GenerationLog(
        generation=generation,
        individuals=individuals,
        best_fitness=best,
        best_so_far=max(best, tracker.fitness),
        wall_time=time.perf_counter() - started,
    )
    failed = sum(ind.failed for ind in individuals)
    logger.info(
        f"Generation {generation}: population={log.population} best={log.best_fitness:.4f} "
        f"mean={log.mean_fitness:.4f} best_so_far={log.best_so_far:.4f} failed={failed} "
        f"({log.wall_time:.1f}s)"
    )
    return log


def prepare_training_data(data: Union[Dataset, TrainingData], k: int) -> TrainingData:
    training_data = data if isinstance(data, TrainingData) else TrainingData.from_dataset(data, k)
    if training_data.total_qubits != k:
        raise EvolutionError(f"Data encoded for {training_data.total_qubits} qubits, library has k={k}")
    if training_data.size(Partition.TRAIN) == 0 or training_data.size(Partition.VALIDATION) == 0:
        raise EvolutionError("Training and validation partitions must both be non-empty")
    return training_data


# ===== MQNE =====

def _sample_with_retries(sample: Callable[[], Path], what: str) -> Path:
    for _ in range(MAX_PATH_ATTEMPTS):
        try:
            return sample()
        except GraphError as e:
            last_error = e
    raise EvolutionError(f"Could not sample {what} in {MAX_PATH_ATTEMPTS} attempts: {last_error}")


def initial_candidates(graph: BlockGraph, config: MqneConfig) -> List[Candidate]:
    candidates = []
    for index in range(config.offspring_at(1)):
        rng = stream_rng(config.seed, 'path_init', 1, index)
        path = _sample_with_retries(
            lambda: random_path(graph, config.initial_length, config.start_policy, rng),
            f"an initial path for individual {index}",
        )
        candidates.append(Candidate(index=index, blocks=path.nodes))
    return candidates


def offspring_candidates(
    graph: BlockGraph,
    config: MqneConfig,
    generation: int,
    survivors: Sequence[Individual],
    models: Dict[int, TrainedModel],
) -> List[Candidate]:
    """Grow each survivor by ``n`` independent segments; only a path's last node is consulted."""
    inherit = config.train.init_policy == InitPolicy.INHERIT
    candidates = []
    for survivor in survivors:
        parent_model = models.get(survivor.index)
        for _ in range(config.offspring_at(generation)):
            index = len(candidates)
            rng = stream_rng(config.seed, 'path_extend', generation, index)
            path = _sample_with_retries(
                lambda: extend_path(graph, Path(survivor.blocks), config.segment_length, rng),
                f"an extension of individual {survivor.index}",
            )
            candidates.append(Candidate(
                index=index,
                blocks=path.nodes,
                parent=survivor.index,
                parent_theta=parent_model.theta if inherit and parent_model is not None else None,
            ))
    return candidates


def run_mqne(
    graph: BlockGraph,
    library: BlockLibrary,
    data: Union[Dataset, TrainingData],
    config: MqneConfig,
    on_generation: Optional[Callable[[GenerationLog], None]] = None,
) -> EvolutionResult:
    """
    Run the neuroevolution loop.

    Args:
        graph: Block graph built from ``library``
        library: Gate-block library
        data: Dataset with train and validation partitions (or its encoded form)
        config: Search hyperparameters
        on_generation: Called with each generation's log as soon as it is complete

    Returns:
        Best model, its path, all generation logs and the run outcome

    Raises:
        EvolutionError: If the inputs are inconsistent or no individual trains
    """
    if graph.library.spec != library.spec or len(graph.library) != len(library):
        raise EvolutionError("Graph was built from a different library")
    training_data = prepare_training_data(data, library.k)

    logger.info(
        f"Starting MQNE: n={config.offspring} t={config.survivors} l={config.initial_length} "
        f"l'={config.segment_length} f_c={config.fitness_threshold} g_c={config.max_generations}"
    )
    tracker = BestTracker()
    logs: List[GenerationLog] = []
    candidates = initial_candidates(graph, config)
    generation = 1
    while True:
        started = time.perf_counter()
        results = evaluate_generation(
            candidates, generation, library, training_data, config.train, config.seed, config.workers
        )
        log = make_log(generation, results, tracker, started)
        tracker.update(results)
        logs.append(log)
        if on_generation is not None:
            on_generation(log)

        if log.best_fitness >= config.fitness_threshold:
            outcome = RunOutcome.THRESHOLD_REACHED
            break
        if generation >= config.max_generations:
            outcome = RunOutcome.BUDGET_EXHAUSTED
            break

        survivors = select_survivors(log.individuals, config.survivors_at(generation))
        models = {ind.index: model for ind, model in results if model is not None}
        generation += 1
        candidates = offspring_candidates(graph, config, generation, survivors, models)

    logger.info(f"MQNE finished ({outcome.value}) after {generation} generations; best fitness {tracker.fitness:.4f}")
    return tracker.result(logs, outcome)
