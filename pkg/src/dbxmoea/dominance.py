"""Pareto dominance, non-dominated sorting and crowding distance.

The constrained variant gives the infeasibility value strict priority: an
individual closer to the feasible region dominates one further away whatever
their objective values, and equal infeasibility falls back to plain Pareto
dominance on the objectives.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from dbxmoea.population import ConfigurationError, Individual, Population

INFINITE = float("inf")


def dominates(a: Individual, b: Individual, constrained: bool = False) -> bool:
    """Return True when ``a`` dominates ``b`` (minimization)."""
    if a.objectives.shape != b.objectives.shape:
        raise ValueError(
            f"objective dimension mismatch: {a.objectives.shape} vs {b.objectives.shape}"
        )
    if constrained:
        if a.infeasibility is None or b.infeasibility is None:
            raise ValueError("constrained dominance needs infeasibility values")
        if a.infeasibility < b.infeasibility:
            return True
        if a.infeasibility > b.infeasibility:
            return False
    return bool(np.all(a.objectives <= b.objectives) and np.any(a.objectives < b.objectives))


def dominance_matrix(
    objectives: np.ndarray, infeasibility: np.ndarray | None = None
) -> np.ndarray:
    """Pairwise matrix ``D`` with ``D[i, j]`` true iff i dominates j."""
    F = np.asarray(objectives, dtype=float)
    n = F.shape[0]
    le = np.ones((n, n), dtype=bool)
    lt = np.zeros((n, n), dtype=bool)
    for column in F.T:
        le &= column[:, None] <= column[None, :]
        lt |= column[:, None] < column[None, :]
    D = le & lt
    if infeasibility is not None:
        c = np.asarray(infeasibility, dtype=float)
        D = (c[:, None] < c[None, :]) | ((c[:, None] == c[None, :]) & D)
    return D


def crowding_from_arrays(objectives: np.ndarray, genomes: np.ndarray) -> np.ndarray:
    """Crowding distance of every row of ``objectives`` within one front.

    For each objective the front is sorted by that objective; the first and
    last individuals get ``inf`` and interior ones add the raw gap between
    their two sorted neighbours. Ties in the sort are broken by the full
    objective vector and then the genome, so the result does not depend on
    the order the front is given in.
    """
    F = np.asarray(objectives, dtype=float)
    n, m = F.shape
    if n == 0:
        raise ValueError("crowding distance of an empty front")
    distance = np.zeros(n)
    if n <= 2:
        distance[:] = INFINITE
        return distance
    tiebreak = [genomes[:, k] for k in range(genomes.shape[1] - 1, -1, -1)]
    tiebreak += [F[:, k] for k in range(m - 1, -1, -1)]
    for obj in range(m):
        order = np.lexsort(tiebreak + [F[:, obj]])
        column = F[order, obj]
        distance[order[1:-1]] += column[2:] - column[:-2]
        distance[order[0]] = INFINITE
        distance[order[-1]] = INFINITE
    return distance


def crowding_distances(front: Sequence[Individual]) -> np.ndarray:
    if len(front) == 0:
        raise ValueError("crowding distance of an empty front")
    F = np.vstack([ind.objectives for ind in front])
    G = np.vstack([ind.genome for ind in front])
    return crowding_from_arrays(F, G)


@dataclass(frozen=True, eq=False)
class RankedPopulation:
    """A population partitioned into non-dominated fronts.

    Attributes:
        population: Members, each carrying its rank and crowding distance.
        fronts: Member indices per front, rank 1 first, ascending index order.
        ranks: 1-based rank per member.
        crowding: Crowding distance per member, computed within its front.
        matrix: Pairwise dominance, ``matrix[i, j]`` true iff i dominates j.
        constrained: Whether infeasibility took priority during the sort.
    """

    population: Population
    fronts: tuple[tuple[int, ...], ...]
    ranks: np.ndarray
    crowding: np.ndarray
    matrix: np.ndarray = field(repr=False)
    constrained: bool = False

    def dominated_list(self, index: int) -> np.ndarray:
        """Indices of the members that member ``index`` dominates."""
        return np.flatnonzero(self.matrix[index])

    @cached_property
    def selection_keys(self) -> list[tuple[int, float]]:
        """(rank, -crowding) per member; smaller is better."""
        return list(zip(self.ranks.tolist(), (-self.crowding).tolist()))

    @cached_property
    def dominated(self) -> tuple[np.ndarray, ...]:
        return tuple(np.flatnonzero(row) for row in self.matrix)

    def __len__(self) -> int:
        return len(self.population)

    def __getitem__(self, index: int) -> Individual:
        return self.population[index]

    @property
    def first_front(self) -> tuple[int, ...]:
        return self.fronts[0]

    @property
    def all_non_dominated(self) -> bool:
        return len(self.fronts) == 1


def non_dominated_sort(pop: Population, constrained: bool = False) -> RankedPopulation:
    """Rank ``pop`` into fronts and attach crowding distances.

    Uses the domination-count bookkeeping: front k+1 is whatever reaches zero
    remaining dominators once fronts 1..k are removed.
    """
    n = len(pop)
    if n == 0:
        raise ConfigurationError("cannot sort an empty population")
    infeasibility = None
    if constrained:
        infeasibility = pop.infeasibilities
        if infeasibility is None:
            raise ValueError("constrained sort needs infeasibility values")
    D = dominance_matrix(pop.objectives, infeasibility)
    remaining_dominators = D.sum(axis=0)
    ranks = np.zeros(n, dtype=int)
    fronts = []
    current = np.flatnonzero(remaining_dominators == 0)
    rank = 1
    while current.size:
        ranks[current] = rank
        fronts.append(tuple(int(i) for i in current))
        remaining_dominators = remaining_dominators - D[current].sum(axis=0)
        remaining_dominators[current] = -1
        current = np.flatnonzero(remaining_dominators == 0)
        rank += 1

    genomes = pop.genomes
    crowding = np.zeros(n)
    for front in fronts:
        idx = np.array(front)
        crowding[idx] = crowding_from_arrays(pop.objectives[idx], genomes[idx])

    members = tuple(
        ind.with_ranking(int(ranks[i]), float(crowding[i])) for i, ind in enumerate(pop)
    )
    return RankedPopulation(
        population=Population(members),
        fronts=tuple(fronts),
        ranks=ranks,
        crowding=crowding,
        matrix=D,
        constrained=constrained,
    )


def crowded_compare(a: Individual, b: Individual) -> int:
    """Crowded comparison: -1 if a is better, 1 if b is better, 0 on a tie.

    Lower rank wins; within a rank the larger crowding distance wins.
    """
    if a.rank is None or b.rank is None or a.crowding is None or b.crowding is None:
        raise ValueError("crowded comparison needs ranked individuals")
    if a.rank != b.rank:
        return -1 if a.rank < b.rank else 1
    if a.crowding != b.crowding:
        return -1 if a.crowding > b.crowding else 1
    return 0
