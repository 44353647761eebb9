"""End-to-end evolve runs: data, search space, search and the result bundle."""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from cli.schemas import RunConfig, Task
from dataset import (
    ClusterIsingSpec,
    Dataset,
    DatasetError,
    Partition,
    gen_cluster_ising,
    lambda_grid,
    load_dataset,
    load_mnist,
    load_wdbc,
    split,
)
from graph import BlockGraph, StartPolicy, build_graph, save_path
from library import LibraryMode, LibrarySpec, BlockLibrary, enumerate_library, save_library
from utils.analysis_utils import fitness_table, generations_frame
from utils.checksum import calculate_checksum

from .evolution import EvolutionResult, GenerationLog, MqneConfig, run_mqne
from .genetic import GeneticConfig, run_genetic
from .seeding import STREAMS, seed_sequence
from .trainer import InitPolicy, TrainConfig, history_to_csv, save_model


logger = logging.getLogger(__name__)

MANIFEST_VERSION = 1
MANIFEST_FILE = 'manifest.json'
LOG_FILE = 'run.log'
BUNDLE_FILES = [
    'generations.csv',
    'fitness_table.csv',
    'best_history.csv',
    'best_model.txt',
    'best_path.txt',
    'library.txt',
]


@dataclass
class ExperimentResult:
    result: EvolutionResult
    output_dir: Path
    manifest: Dict[str, Any]


# ===== Inputs =====

def prepare_dataset(config: RunConfig, workers: int = 1) -> Dataset:
    """
    Load or generate the task's dataset and apply the configured split.

    Raises:
        DatasetError: If no split is configured and the data carries none
    """
    section = config.dataset
    if section.cache:
        dataset = load_dataset(section.cache)
        logger.info(f"Loaded cached dataset '{dataset.name}' from {section.cache}")
    elif config.task == Task.MNIST:
        dataset = load_mnist(
            section.image_file,
            section.label_file,
            digits=section.digits,
            size=section.image_size,
            limit=section.limit,
        )
    elif config.task == Task.CANCER:
        dataset = load_wdbc(section.csv_file)
    else:
        spec = ClusterIsingSpec(spins=section.spins, lambdas=tuple(lambda_grid(section.samples)))
        dataset = gen_cluster_ising(spec, workers=workers)

    if section.split is not None:
        dataset = split(dataset, section.split.counts(), seed_sequence(config.seed, 'split'))
    elif dataset.partition_size(Partition.TRAIN) == 0:
        raise DatasetError("No split configured and the dataset has no training partition")

    logger.info(f"Dataset '{dataset.name}': {dataset.summary()['partitions']}")
    return dataset


def build_search_space(config: RunConfig, k: int, workers: int = 1) -> Tuple[BlockLibrary, BlockGraph]:
    section = config.library
    spec = LibrarySpec(
        k=k,
        mode=LibraryMode(section.mode),
        cutoff=section.cutoff,
        include_empty_block=section.include_empty_block,
    )
    library = enumerate_library(spec, max_blocks=section.max_blocks)
    graph = build_graph(
        library,
        exclude_empty=config.graph.exclude_empty,
        workers=workers,
        max_nodes=config.graph.max_nodes,
    )
    logger.info(f"Search space: {library.spec.describe()} blocks={len(library)} edges={graph.edge_count}")
    return library, graph


def train_config_from(config: RunConfig) -> TrainConfig:
    section = config.training
    return TrainConfig(
        learning_rate=section.learning_rate,
        batch_size=section.batch_size,
        epochs=section.epochs,
        max_steps=section.max_steps,
        beta1=section.beta1,
        beta2=section.beta2,
        epsilon=section.epsilon,
        init_policy=InitPolicy(section.init_policy),
        seed=config.seed if section.seed is None else section.seed,
    )


def mqne_config_from(config: RunConfig, workers: int) -> MqneConfig:
    search = config.search
    if config.graph.start == 'uniform':
        start = StartPolicy.uniform()
    else:
        start = StartPolicy.fixed(config.graph.start_index)
    return MqneConfig(
        offspring=search.offspring,
        survivors=search.survivors,
        initial_length=search.initial_length,
        segment_length=search.segment_length,
        fitness_threshold=search.fitness_threshold,
        max_generations=search.max_generations,
        start_policy=start,
        train=train_config_from(config),
        seed=config.seed,
        population_schedule=tuple(search.population_schedule),
        survivor_schedule=tuple(search.survivor_schedule),
        workers=workers,
    )


def genetic_config_from(config: RunConfig, workers: int) -> GeneticConfig:
    section = config.genetic
    return GeneticConfig(
        population=section.population,
        survivors=section.survivors,
        mutation_probability=section.mutation_probability,
        circuit_length=section.circuit_length,
        fitness_threshold=(
            config.search.fitness_threshold if section.fitness_threshold is None else section.fitness_threshold
        ),
        max_generations=(
            config.search.max_generations if section.max_generations is None else section.max_generations
        ),
        train=train_config_from(config),
        seed=config.seed,
        workers=workers,
    )


# ===== Run =====

def run_experiment(
    config: RunConfig,
    baseline: Optional[str] = None,
    workers: Optional[int] = None,
    output_dir: Optional[Union[str, Path]] = None,
) -> ExperimentResult:
    """
    Run MQNE (or the genetic baseline) and write the result bundle.

    Args:
        config: Validated run configuration
        baseline: ``"mqne"`` or ``"genetic"`` (defaults to the config value)
        workers: Parallel training runs (defaults to the config value)
        output_dir: Bundle directory (defaults to the config value)

    Returns:
        The search result, the bundle directory and the manifest
    """
    baseline = baseline or config.baseline.value
    workers = workers or config.workers
    output_dir = Path(output_dir or config.output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)

    dataset = prepare_dataset(config, workers)
    library, graph = build_search_space(config, dataset.data_qubits + 1, workers)

    def report(log: GenerationLog) -> None:
        logger.info(f"Generation {log.generation} complete: best={log.best_fitness:.4f}")

    if baseline == 'genetic':
        search_config = genetic_config_from(config, workers)
        result = run_genetic(library, dataset, search_config, on_generation=report)
    else:
        search_config = mqne_config_from(config, workers)
        result = run_mqne(graph, library, dataset, search_config, on_generation=report)

    manifest = _save_bundle(output_dir, config, baseline, search_config, dataset, library, graph, result)
    return ExperimentResult(result=result, output_dir=output_dir, manifest=manifest)


def result_summary(result: EvolutionResult) -> Dict[str, Any]:
    best = result.best_individual
    return {
        'outcome': result.outcome.value,
        'generations': len(result.logs),
        'evaluated': result.evaluated,
        'best_fitness': best.fitness,
        'best_test_fitness': best.test_fitness,
        'best_generation': best.generation,
        'best_index': best.index,
        'best_path': " -> ".join(str(b) for b in best.blocks),
        'param_count': best.param_count,
        'rot_count': best.rot_count,
        'crx_count': best.crx_count,
    }


def _generation_rows(logs: List[GenerationLog]) -> List[Dict[str, Any]]:
    rows = []
    for log in logs:
        for individual in log.individuals:
            row = individual.to_dict()
            del row['error']
            rows.append(row)
    return rows


def _save_bundle(
    output_dir: Path,
    config: RunConfig,
    baseline: str,
    search_config: Union[MqneConfig, GeneticConfig],
    dataset: Dataset,
    library: BlockLibrary,
    graph: BlockGraph,
    result: EvolutionResult,
) -> Dict[str, Any]:
    """Write every bundle file, then the manifest with their checksums."""
    generations = generations_frame(_generation_rows(result.logs))
    generations.to_csv(output_dir / 'generations.csv', index=False, float_format='%.10g')
    fitness_table(generations).to_csv(output_dir / 'fitness_table.csv', index=False, float_format='%.10g')
    history_to_csv(result.best_model.history, output_dir / 'best_history.csv')
    save_model(result.best_model, output_dir / 'best_model.txt')
    if result.best_individual.blocks:
        save_path(result.best_path, output_dir / 'best_path.txt')
    else:
        (output_dir / 'best_path.txt').write_text("\n")
    save_library(library, output_dir / 'library.txt')

    manifest = {
        'version': MANIFEST_VERSION,
        'baseline': baseline,
        'config': config.model_dump(mode='json'),
        'search': search_config.to_dict(),
        'seed': config.seed,
        'streams': sorted(STREAMS),
        'dataset': {
            'name': dataset.name,
            'summary': dataset.summary(),
            'provenance': dataset.provenance,
        },
        'library': {'spec': library.spec.describe(), 'count': len(library)},
        'graph': {'nodes': graph.node_count, 'edges': graph.edge_count, 'sha256': graph.digest()},
        'result': result_summary(result),
        'files': {name: calculate_checksum(output_dir / name) for name in BUNDLE_FILES},
    }
    with open(output_dir / MANIFEST_FILE, 'w') as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")

    logger.info(f"Results saved to {output_dir}")
    return manifest
