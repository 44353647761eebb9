"""Analysis and formatting utilities for evolution runs."""

from typing import Any, Dict, List

import pandas as pd


GENERATION_COLUMNS = [
    'generation', 'index', 'parent', 'length', 'param_count', 'rot_count', 'crx_count',
    'fitness', 'test_fitness', 'final_train_loss', 'failed', 'path',
]
FITNESS_TABLE_COLUMNS = ['generation', 'population', 'best', 'mean', 'best_so_far', 'path_length']


def generations_frame(rows: List[Dict[str, Any]]) -> pd.DataFrame:
    """
    One row per evaluated individual.

    Args:
        rows: ``Individual.to_dict()`` records in generation/index order
    """
    frame = pd.DataFrame(rows)
    for column in GENERATION_COLUMNS:
        if column not in frame:
            frame[column] = pd.Series(dtype=object)
    frame = frame[GENERATION_COLUMNS]
    frame['parent'] = frame['parent'].astype('Int64')
    return frame


def fitness_table(generations: pd.DataFrame) -> pd.DataFrame:
    """
    Plot-ready per-generation summary.

    ``path_length`` is the length of the generation's fittest individual
    (lowest index on ties).
    """
    if generations.empty:
        return pd.DataFrame(columns=FITNESS_TABLE_COLUMNS)

    ordered = generations.sort_values(['generation', 'fitness', 'index'], ascending=[True, False, True])
    best_rows = ordered.groupby('generation', sort=True).head(1).set_index('generation')
    grouped = generations.groupby('generation', sort=True)['fitness']

    table = pd.DataFrame({
        'population': grouped.size(),
        'best': grouped.max(),
        'mean': grouped.mean(),
    })
    table['best_so_far'] = table['best'].cummax()
    table['path_length'] = best_rows['length']
    return table.reset_index()[FITNESS_TABLE_COLUMNS]


def format_fitness_table(table: pd.DataFrame) -> str:
    """
    Format a fitness table in a human-readable way.

    Args:
        table: Output of ``fitness_table``

    Returns:
        Formatted string with one line per generation
    """
    output = []
    output.append("\n===== FITNESS BY GENERATION =====")
    output.append(f"{'gen':>4} {'pop':>5} {'best':>8} {'mean':>8} {'so far':>8} {'length':>7}")
    for row in table.itertuples(index=False):
        output.append(
            f"{row.generation:>4} {row.population:>5} {row.best:>8.4f} {row.mean:>8.4f} "
            f"{row.best_so_far:>8.4f} {row.path_length:>7}"
        )
    return "\n".join(output)


def format_run_summary(summary: Dict[str, Any]) -> str:
    """
    Format the outcome of an evolve run.

    Args:
        summary: Manifest ``result`` section

    Returns:
        Formatted string
    """
    output = []

    output.append("\n" + "=" * 50)
    output.append("EVOLUTION RESULTS")
    output.append("=" * 50)
    output.append(f"Outcome: {summary.get('outcome', 'unknown')}")
    output.append(f"Generations: {summary.get('generations', 0)}")
    output.append(f"Circuits evaluated: {summary.get('evaluated', 0)}")
    output.append(f"Best fitness: {summary.get('best_fitness', 0):.4f}")
    if summary.get('best_test_fitness') is not None:
        output.append(f"Best test fitness: {summary['best_test_fitness']:.4f}")

    output.append("\n----- Best Circuit -----")
    output.append(f"Path: {summary.get('best_path', '')}")
    output.append(f"Parameters: {summary.get('param_count', 0)}")
    output.append(f"R gates: {summary.get('rot_count', 0)}  CRx gates: {summary.get('crx_count', 0)}")

    output.append("=" * 50 + "\n")
    return "\n".join(output)
