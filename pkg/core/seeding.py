"""Named random streams derived from one master seed."""

from typing import Dict

import numpy as np


STREAMS: Dict[str, int] = {
    'path_init': 1,
    'path_extend': 2,
    'theta_init': 3,
    'batch_shuffle': 4,
    'genetic_init': 5,
    'genetic_variation': 6,
    'split': 7,
}


def seed_sequence(master_seed: int, stream: str, *coords: int) -> np.random.SeedSequence:
    """
    Seed sequence for ``stream`` at the given coordinates (generation, individual, ...).

    Raises:
        KeyError: If the stream name is unknown
    """
    return np.random.SeedSequence([int(master_seed), STREAMS[stream], *(int(c) for c in coords)])


def stream_rng(master_seed: int, stream: str, *coords: int) -> np.random.Generator:
    return np.random.default_rng(seed_sequence(master_seed, stream, *coords))
