"""Tournament selection under the crowded comparison."""

from __future__ import annotations

import numpy as np

from dbxmoea.dominance import RankedPopulation
from dbxmoea.population import Individual


def tournament_index(ranked: RankedPopulation, size: int, rng: np.random.Generator) -> int:
    """Draw ``size`` members uniformly with replacement and return the best one's index.

    Lower rank wins, then larger crowding; on a full tie the earliest draw wins.
    """
    if size < 1 or size > len(ranked):
        raise ValueError(f"tournament size {size} invalid for population of {len(ranked)}")
    keys = ranked.selection_keys
    draws = rng.integers(0, len(ranked), size=size).tolist()
    best = draws[0]
    for cand in draws[1:]:
        if keys[cand] < keys[best]:
            best = cand
    return best


def tournament_select(
    ranked: RankedPopulation, size: int, rng: np.random.Generator
) -> Individual:
    return ranked[tournament_index(ranked, size, rng)]
