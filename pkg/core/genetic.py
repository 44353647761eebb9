"""
Genetic-algorithm baseline over raw block sequences.

Sequences are drawn from the library without connection rules, recombined by
one-point crossover and mutated position by position. The connection rules
are never enforced here.
"""

import logging
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from dataset import Dataset
from library import BlockLibrary

from .evolution import (
    BestTracker,
    Candidate,
    EvolutionError,
    EvolutionResult,
    GenerationLog,
    RunOutcome,
    evaluate_generation,
    make_log,
    prepare_training_data,
    select_survivors,
)
from .seeding import stream_rng
from .trainer import TrainConfig, TrainingData


logger = logging.getLogger(__name__)


class CutOutOfRangeError(EvolutionError):
    """Exception raised when a crossover cut lies outside its sequence."""
    pass


@dataclass(frozen=True)
class GeneticConfig:
    population: int = 9
    survivors: int = 3
    mutation_probability: float = 0.1
    circuit_length: int = 5
    fitness_threshold: float = 0.96
    max_generations: int = 10
    train: TrainConfig = field(default_factory=TrainConfig)
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if not 1 <= self.survivors < self.population:
            raise EvolutionError(f"Need 1 <= t < n, got t={self.survivors}, n={self.population}")
        if not 0 <= self.mutation_probability <= 1:
            raise EvolutionError(f"Mutation probability must lie in [0, 1], got {self.mutation_probability}")
        if self.circuit_length < 1:
            raise EvolutionError(f"Circuit length must be at least 1, got {self.circuit_length}")
        if not 0 <= self.fitness_threshold <= 1:
            raise EvolutionError(f"Fitness threshold must lie in [0, 1], got {self.fitness_threshold}")
        if self.max_generations < 1:
            raise EvolutionError(f"max_generations must be at least 1, got {self.max_generations}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            'population': self.population,
            'survivors': self.survivors,
            'mutation_probability': self.mutation_probability,
            'circuit_length': self.circuit_length,
            'fitness_threshold': self.fitness_threshold,
            'max_generations': self.max_generations,
            'train': self.train.to_dict(),
            'seed': self.seed,
        }


# ===== Variation Operators =====

def crossover(
    c1: Sequence[int],
    c2: Sequence[int],
    cut1: int,
    cut2: int,
) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """
    Exchange tails: ``c1[:cut1] + c2[cut2:]`` and ``c2[:cut2] + c1[cut1:]``.

    Raises:
        CutOutOfRangeError: If a cut lies outside ``0..len`` of its sequence
    """
    if not 0 <= cut1 <= len(c1):
        raise CutOutOfRangeError(f"Cut {cut1} outside 0..{len(c1)}")
    if not 0 <= cut2 <= len(c2):
        raise CutOutOfRangeError(f"Cut {cut2} outside 0..{len(c2)}")
    c1, c2 = tuple(c1), tuple(c2)
    return c1[:cut1] + c2[cut2:], c2[:cut2] + c1[cut1:]


def random_cuts(c1: Sequence[int], c2: Sequence[int], rng: np.random.Generator) -> Tuple[int, int]:
    """Cuts drawn uniformly from ``0..len`` of each sequence."""
    return int(rng.integers(len(c1) + 1)), int(rng.integers(len(c2) + 1))


def mutation(
    c: Sequence[int],
    probability: float,
    choices: Sequence[int],
    rng: np.random.Generator,
) -> Tuple[int, ...]:
    """
    Replace each position, with probability ``probability``, by a different block.

    Args:
        c: Block sequence
        probability: Per-position selection probability
        choices: Library indices a position may take
        rng: Random stream
    """
    choices = np.asarray(choices, dtype=np.int64)
    out = list(c)
    selected = rng.random(len(out)) < probability
    for position in np.flatnonzero(selected):
        current = out[position]
        others = choices[choices != current]
        if others.size:
            out[position] = int(others[rng.integers(others.size)])
    return tuple(out)


def sampling_pool(library: BlockLibrary) -> np.ndarray:
    """Library indices used by the baseline (every block but the empty one)."""
    empty = library.empty_index()
    return np.array([i for i in range(len(library)) if i != empty], dtype=np.int64)


# ===== Search =====

def initial_population(pool: np.ndarray, config: GeneticConfig) -> List[Candidate]:
    candidates = []
    for index in range(config.population):
        rng = stream_rng(config.seed, 'genetic_init', 1, index)
        blocks = tuple(int(b) for b in pool[rng.integers(pool.size, size=config.circuit_length)])
        candidates.append(Candidate(index=index, blocks=blocks))
    return candidates


def next_population(
    survivors: Sequence[Tuple[int, ...]],
    pool: np.ndarray,
    config: GeneticConfig,
    generation: int,
) -> List[Candidate]:
    """Crossover of random survivor pairs (two children per pair), then mutation."""
    rng = stream_rng(config.seed, 'genetic_variation', generation)
    children: List[Tuple[int, ...]] = []
    while len(children) < config.population:
        if len(survivors) > 1:
            i, j = rng.choice(len(survivors), size=2, replace=False)
        else:
            i = j = 0
        c1, c2 = survivors[i], survivors[j]
        cut1, cut2 = random_cuts(c1, c2, rng)
        children.extend(crossover(c1, c2, cut1, cut2))
    children = children[: config.population]
    return [
        Candidate(index=index, blocks=mutation(child, config.mutation_probability, pool, rng))
        for index, child in enumerate(children)
    ]


def run_genetic(
    library: BlockLibrary,
    data: Union[Dataset, TrainingData],
    config: GeneticConfig,
    on_generation: Optional[Callable[[GenerationLog], None]] = None,
) -> EvolutionResult:
    """
    Run the genetic baseline.

    Survivors are not re-evaluated; they count only toward the best-so-far
    record.
    """
    training_data = prepare_training_data(data, library.k)
    pool = sampling_pool(library)
    if pool.size < 2:
        raise EvolutionError("Genetic search needs at least two non-empty blocks")

    logger.info(
        f"Starting genetic baseline: n={config.population} t={config.survivors} "
        f"p_mut={config.mutation_probability} length={config.circuit_length}"
    )
    tracker = BestTracker()
    logs: List[GenerationLog] = []
    candidates = initial_population(pool, config)
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

        survivors = [ind.blocks for ind in select_survivors(log.individuals, config.survivors)]
        generation += 1
        candidates = next_population(survivors, pool, config, generation)

    logger.info(f"Genetic baseline finished ({outcome.value}); best fitness {tracker.fitness:.4f}")
    return tracker.result(logs, outcome)
