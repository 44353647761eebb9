#!/usr/bin/env python
"""Main CLI entry point for the MQNE toolkit."""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

import pandas as pd

from core.evolution import RunOutcome
from core.experiment import LOG_FILE, MANIFEST_FILE, run_experiment
from dataset import (
    ClusterIsingSpec,
    DatasetError,
    gen_cluster_ising,
    lambda_grid,
    load_mnist,
    load_wdbc,
    provenance_path,
    save_dataset,
    split,
)
from graph import build_graph, find_dead_ends, save_graph
from library import (
    DEFAULT_MAX_BLOCKS,
    LibraryLimitError,
    LibraryMode,
    LibrarySpec,
    count_closed_form,
    enumerate_library,
    save_library,
)
from utils.analysis_utils import fitness_table, format_fitness_table, format_run_summary
from utils.config import ConfigError, add_log_file, load_runtime_config, save_runtime_config, setup_logging
from utils.parameters import apply_overrides, merge_configs, parse_dotted_overrides

from .schemas import parse_run_config


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_BUDGET_EXHAUSTED = 3

RESOLVED_CONFIG_FILE = 'config.yaml'


# ===== Argument Parsing =====

def _add_library_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--qubits', type=int, required=True, help='Number of qubits k')
    parser.add_argument(
        '--mode',
        choices=[m.value for m in LibraryMode],
        default=LibraryMode.FULL.value,
        help='Library variant (default: full)'
    )
    parser.add_argument('--cutoff', type=int, help='Maximum CRx gates per block (cutoff mode)')
    parser.add_argument(
        '--no-empty-block',
        action='store_false',
        dest='include_empty_block',
        help='Leave the all-identity block out of the library'
    )
    parser.add_argument(
        '--max-blocks',
        type=int,
        default=DEFAULT_MAX_BLOCKS,
        dest='max_blocks',
        help=f'Refuse to enumerate more blocks than this (default: {DEFAULT_MAX_BLOCKS})'
    )


def _split_counts(text: Optional[str]) -> Optional[List[int]]:
    if text is None:
        return None
    try:
        counts = [int(part) for part in text.split(',')]
    except ValueError:
        raise argparse.ArgumentTypeError(f"Split must be comma-separated integers, got '{text}'")
    if len(counts) not in (2, 3):
        raise argparse.ArgumentTypeError("Split needs train,validation[,test] counts")
    return counts


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='mqne',
        description='Markovian quantum neuroevolution: gate-block libraries, block graphs and circuit search',
        formatter_class=argparse.RawDescriptionHelpFormatter
    )
    parser.add_argument('-v', '--verbose', action='store_true', help='Enable debug logging')
    commands = parser.add_subparsers(dest='command', required=True)

    # library
    library = commands.add_parser('library', help='Enumerate a gate-block library')
    _add_library_flags(library)
    library.add_argument('--count-only', action='store_true', dest='count_only', help='Print the closed-form count only')
    library.add_argument('--output', help='Library file to write')

    # graph
    graph = commands.add_parser('graph', help='Build the block graph of a library')
    _add_library_flags(graph)
    graph.add_argument('--keep-empty-node', action='store_false', dest='exclude_empty', help='Keep the empty block as a node')
    graph.add_argument('--workers', type=int, default=1, help='Threads used to evaluate the rules')
    graph.add_argument('--output', help='Adjacency-list file to write')

    # dataset
    dataset = commands.add_parser('dataset', help='Prepare and cache a benchmark dataset')
    tasks = dataset.add_subparsers(dest='task', required=True)

    mnist = tasks.add_parser('mnist', help='Two MNIST digits from IDX files')
    mnist.add_argument('--images', required=True, help='IDX3 image file')
    mnist.add_argument('--labels', required=True, help='IDX1 label file')
    mnist.add_argument('--digits', default='1,9', help='Two digits to keep (default: 1,9)')
    mnist.add_argument('--size', type=int, default=16, help='Downscaled image side (default: 16)')
    mnist.add_argument('--limit', type=int, help='Keep at most this many images')

    cancer = tasks.add_parser('cancer', help='WDBC breast cancer CSV')
    cancer.add_argument('--csv', required=True, help='WDBC CSV file')

    spt = tasks.add_parser('spt', help='Cluster-Ising ground states')
    spt.add_argument('--n', type=int, default=8, help='Number of spins (default: 8)')
    spt.add_argument('--samples', type=int, default=2000, help='Lambda grid size (default: 2000)')
    spt.add_argument('--workers', type=int, default=1, help='Threads used for diagonalization')

    for task_parser in (mnist, cancer, spt):
        task_parser.add_argument('--output', required=True, help='Dataset container to write')
        task_parser.add_argument('--split', type=_split_counts, help='train,validation[,test] counts')
        task_parser.add_argument('--seed', type=int, help='Seed for the split (required with --split)')

    # evolve
    evolve = commands.add_parser(
        'evolve',
        help='Run MQNE or the genetic baseline',
        description='Extra --section.key=value flags override values from the config file'
    )
    evolve.add_argument(
        '--config',
        required=True,
        action='append',
        help='Path to YAML run configuration (repeat to layer files; later files win)'
    )
    evolve.add_argument('--baseline', choices=['mqne', 'genetic'], help='Search algorithm (overrides the config value)')
    evolve.add_argument('--workers', type=int, help='Individuals trained in parallel')
    evolve.add_argument('--seed', type=int, help='Master seed')
    evolve.add_argument('--output-dir', dest='output_dir', help='Bundle directory')

    # report
    report = commands.add_parser('report', help='Summarize a finished run')
    report.add_argument('--run-dir', required=True, dest='run_dir', help='Bundle directory of an evolve run')

    return parser


# ===== Commands =====

def _library_spec(args: argparse.Namespace) -> LibrarySpec:
    return LibrarySpec(
        k=args.qubits,
        mode=LibraryMode(args.mode),
        cutoff=args.cutoff,
        include_empty_block=args.include_empty_block,
    )


def cmd_library(args: argparse.Namespace) -> int:
    spec = _library_spec(args)
    if args.count_only:
        print(count_closed_form(spec))
        return EXIT_OK

    try:
        library = enumerate_library(spec, max_blocks=args.max_blocks)
    except LibraryLimitError as e:
        logger.error(f"{e}; closed-form count is {count_closed_form(spec)}")
        print(count_closed_form(spec))
        return EXIT_ERROR

    output = Path(args.output or f"output/library_k{spec.k}_{spec.mode.value}.txt")
    save_library(library, output)
    print(len(library))
    return EXIT_OK


def cmd_graph(args: argparse.Namespace) -> int:
    library = enumerate_library(_library_spec(args), max_blocks=args.max_blocks)
    graph = build_graph(library, exclude_empty=args.exclude_empty, workers=args.workers)
    dead_ends = find_dead_ends(graph)
    if dead_ends is not None:
        logger.warning(f"{dead_ends.size} nodes have no successor (first: {int(dead_ends[0])})")

    output = Path(args.output or f"output/graph_k{library.k}_{library.spec.mode.value}.txt")
    save_graph(graph, output)
    print(f"nodes={graph.node_count} edges={graph.edge_count} sha256={graph.digest()}")
    return EXIT_OK


def cmd_dataset(args: argparse.Namespace) -> int:
    if args.split is not None and args.seed is None:
        raise ConfigError("--split needs --seed")

    if args.task == 'mnist':
        digits = [int(d) for d in args.digits.split(',')]
        data = load_mnist(args.images, args.labels, digits=digits, size=args.size, limit=args.limit)
    elif args.task == 'cancer':
        data = load_wdbc(args.csv)
    else:
        spec = ClusterIsingSpec(spins=args.n, lambdas=tuple(lambda_grid(args.samples)))
        data = gen_cluster_ising(spec, workers=args.workers)

    if args.split is not None:
        data = split(data, args.split, args.seed)

    path = save_dataset(data, args.output)
    counts = data.class_counts()
    logger.info(f"Class counts: {counts[0]} / {counts[1]}")
    print(f"{len(data)} samples -> {path} (provenance: {provenance_path(path)})")
    return EXIT_OK


def cmd_evolve(args: argparse.Namespace, overrides: dict) -> int:
    raw = {}
    for config_file in args.config:
        raw = merge_configs(raw, load_runtime_config(config_file))
    if overrides:
        logger.info(f"Applying {len(overrides)} config overrides")
        raw = apply_overrides(raw, overrides)
    if args.baseline:
        raw['baseline'] = args.baseline
    if args.seed is not None:
        raw['seed'] = args.seed
    if args.output_dir:
        raw['output_dir'] = args.output_dir
    if args.workers is not None:
        raw['workers'] = args.workers
    config = parse_run_config(raw)

    output_dir = Path(config.output_dir)
    handler = add_log_file(output_dir / LOG_FILE)
    save_runtime_config(config.model_dump(mode='json'), output_dir / RESOLVED_CONFIG_FILE)
    try:
        experiment = run_experiment(config)
    finally:
        logging.getLogger().removeHandler(handler)
        handler.close()

    print(format_run_summary(experiment.manifest['result']))
    if experiment.result.outcome == RunOutcome.THRESHOLD_REACHED:
        return EXIT_OK
    return EXIT_BUDGET_EXHAUSTED


def cmd_report(args: argparse.Namespace) -> int:
    run_dir = Path(args.run_dir)
    generations_file = run_dir / 'generations.csv'
    if not generations_file.exists():
        raise FileNotFoundError(f"No generations.csv in {run_dir}")

    table = fitness_table(pd.read_csv(generations_file))
    table.to_csv(run_dir / 'fitness_table.csv', index=False, float_format='%.10g')
    print(format_fitness_table(table))

    manifest_file = run_dir / MANIFEST_FILE
    if manifest_file.exists():
        with open(manifest_file) as f:
            print(format_run_summary(json.load(f).get('result', {})))
    return EXIT_OK


# ===== Entry Point =====

def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point; returns the process exit code."""
    parser = build_parser()
    args, unknown = parser.parse_known_args(argv)

    overrides = {}
    if unknown:
        overrides = parse_dotted_overrides(unknown)
        leftover = [arg for arg in unknown if not (arg.startswith('--') and '=' in arg)]
        if args.command != 'evolve' or leftover:
            parser.error(f"unrecognized arguments: {' '.join(leftover or unknown)}")

    setup_logging(logging.DEBUG if args.verbose else logging.INFO)

    try:
        if args.command == 'library':
            return cmd_library(args)
        if args.command == 'graph':
            return cmd_graph(args)
        if args.command == 'dataset':
            return cmd_dataset(args)
        if args.command == 'evolve':
            return cmd_evolve(args, overrides)
        return cmd_report(args)
    except KeyboardInterrupt:
        logger.info("Interrupted by user")
        return EXIT_ERROR
    except (ConfigError, DatasetError, FileNotFoundError) as e:
        logger.error(str(e))
        return EXIT_ERROR
    except Exception as e:
        logger.error(f"{args.command} failed: {e}", exc_info=True)
        return EXIT_ERROR


if __name__ == '__main__':
    sys.exit(main())
