"""Value types shared by every stage of the algorithm.

Individuals and populations are immutable once built. Ranking information
(rank, crowding) is attached by :mod:`dbxmoea.dominance`, which returns new
Individual instances rather than mutating existing ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING, Iterator, Sequence

import numpy as np

if TYPE_CHECKING:
    from dbxmoea.problems import Problem


class ConfigurationError(ValueError):
    """Raised for invalid user-facing configuration (sizes, bounds, names)."""


class EvaluationError(RuntimeError):
    """Raised when a problem evaluator returns non-finite values."""


@dataclass(frozen=True, eq=False)
class Individual:
    """One evaluated candidate solution.

    Attributes:
        genome: Decision variables, shape (n,).
        objectives: Objective values (minimized), shape (M,).
        infeasibility: Aggregated scaled constraint violation, ``None`` for
            unconstrained problems. Zero means feasible.
        rank: 1-based front index, set only inside a ranked population.
        crowding: Crowding distance, may be ``inf``; set with ``rank``.
    """

    genome: np.ndarray
    objectives: np.ndarray
    infeasibility: float | None = None
    rank: int | None = None
    crowding: float | None = None

    def __post_init__(self) -> None:
        self.genome.setflags(write=False)
        self.objectives.setflags(write=False)

    @property
    def feasible(self) -> bool:
        return self.infeasibility is None or self.infeasibility == 0.0

    def with_ranking(self, rank: int, crowding: float) -> Individual:
        return Individual(self.genome, self.objectives, self.infeasibility, rank, crowding)

    def unranked(self) -> Individual:
        if self.rank is None:
            return self
        return replace(self, rank=None, crowding=None)


@dataclass(frozen=True)
class Population:
    """Ordered, immutable collection of individuals."""

    members: tuple[Individual, ...]
    _objectives: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not isinstance(self.members, tuple):
            object.__setattr__(self, "members", tuple(self.members))
        if self.members:
            F = np.vstack([ind.objectives for ind in self.members])
        else:
            F = np.empty((0, 0))
        F.setflags(write=False)
        object.__setattr__(self, "_objectives", F)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[Individual]:
        return iter(self.members)

    def __getitem__(self, index: int) -> Individual:
        return self.members[index]

    def __add__(self, other: Population) -> Population:
        return Population(self.members + other.members)

    @property
    def objectives(self) -> np.ndarray:
        """Objective matrix, shape (size, M)."""
        return self._objectives

    @property
    def genomes(self) -> np.ndarray:
        return np.vstack([ind.genome for ind in self.members])

    @property
    def infeasibilities(self) -> np.ndarray | None:
        if not self.members or self.members[0].infeasibility is None:
            return None
        return np.array([ind.infeasibility for ind in self.members], dtype=float)

    def feasible_count(self) -> int:
        return sum(1 for ind in self.members if ind.feasible)


def evaluate(problem: Problem, genome: np.ndarray) -> Individual:
    """Build an Individual by evaluating ``genome`` on ``problem``.

    Raises:
        EvaluationError: If any objective or the infeasibility is not finite.
    """
    genome = np.array(genome, dtype=float)
    objectives, infeasibility = problem.evaluate(genome)
    values = objectives.tolist()
    if infeasibility is not None:
        values.append(infeasibility)
    if not all(math.isfinite(v) for v in values):
        raise EvaluationError(
            f"{problem.name}: non-finite evaluation {objectives!r} "
            f"(infeasibility={infeasibility!r}) at genome {genome!r}"
        )
    return Individual(genome=genome, objectives=objectives, infeasibility=infeasibility)


def new_random_population(
    problem: Problem, size: int, rng: np.random.Generator
) -> Population:
    """Sample ``size`` genomes uniformly inside the problem's box and evaluate them."""
    if size < 2:
        raise ConfigurationError(f"population size must be >= 2, got {size}")
    lower, upper = problem.lower, problem.upper
    if lower.shape != upper.shape or np.any(lower >= upper):
        raise ConfigurationError(f"{problem.name}: malformed bounds")
    genomes = rng.uniform(lower, upper, size=(size, problem.dimension))
    return Population(tuple(evaluate(problem, g) for g in genomes))


def strip_ranking(individuals: Sequence[Individual]) -> Population:
    return Population(tuple(ind.unranked() for ind in individuals))
