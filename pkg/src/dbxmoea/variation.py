"""BLX-alpha recombination, dominance-based mate choice and uniform mutation.

A child is ``phi * x + (1 - phi) * y`` with one ``phi`` drawn per coordinate.
The blend interval depends on the mating strategy:

==============  ===================  ====================
strategy        mate                 phi interval
==============  ===================  ====================
blx             tournament           [-alpha, 1 + alpha]
symmetric-dbx   dominated if any     [-alpha, 1 + alpha]
biased-dbx      dominated if any     [alpha, 1 + alpha] when the mate was a
                                     dominated one, else [-alpha, 1 + alpha]
==============  ===================  ====================

With the biased interval the child lands nearer the dominant parent ``x``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from dbxmoea.dominance import RankedPopulation
from dbxmoea.population import ConfigurationError, Individual
from dbxmoea.selection import tournament_index


class MatingKind(enum.Enum):
    STANDARD_BLX = "blx"
    SYMMETRIC_DBX = "symmetric-dbx"
    BIASED_DBX = "biased-dbx"


STRATEGY_NAMES = tuple(kind.value for kind in MatingKind)


@dataclass(frozen=True)
class MatingStrategy:
    kind: MatingKind = MatingKind.STANDARD_BLX
    alpha: float = 0.5

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha < 1.0:
            raise ConfigurationError(f"alpha must lie in (0, 1), got {self.alpha}")

    @classmethod
    def from_name(cls, name: str, alpha: float = 0.5) -> MatingStrategy:
        try:
            kind = MatingKind(name.lower())
        except ValueError:
            raise ConfigurationError(
                f"unknown strategy {name!r}; expected one of {', '.join(STRATEGY_NAMES)}"
            ) from None
        return cls(kind, alpha)

    @property
    def name(self) -> str:
        return self.kind.value

    @property
    def uses_dominance(self) -> bool:
        return self.kind is not MatingKind.STANDARD_BLX


@dataclass(frozen=True)
class VariationConfig:
    crossover_rate: float = 0.9
    mutation_rate: float = 0.05

    def __post_init__(self) -> None:
        for label, value in (
            ("crossover_rate", self.crossover_rate),
            ("mutation_rate", self.mutation_rate),
        ):
            if not 0.0 <= value <= 1.0:
                raise ConfigurationError(f"{label} must lie in [0, 1], got {value}")


def blx_offspring(
    x: np.ndarray,
    y: np.ndarray,
    phi_low: float,
    phi_high: float,
    rng: np.random.Generator,
    lower: np.ndarray | None = None,
    upper: np.ndarray | None = None,
) -> np.ndarray:
    """Blend ``x`` and ``y`` coordinate-wise, clipping to the bounds if given."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError(f"parent dimension mismatch: {x.shape} vs {y.shape}")
    if phi_low > phi_high:
        raise ValueError(f"empty phi interval [{phi_low}, {phi_high}]")
    phi = rng.uniform(phi_low, phi_high, size=x.shape)
    child = phi * x + (1.0 - phi) * y
    if lower is not None and upper is not None:
        np.clip(child, lower, upper, out=child)
    return child


def choose_mate(
    first_index: int,
    ranked: RankedPopulation,
    strategy: MatingStrategy,
    rng: np.random.Generator,
    tournament_size: int = 2,
) -> tuple[Individual, bool]:
    """Pick a mate for the member at ``first_index``.

    Under a DBX strategy a rank-1 member that dominates someone mates with
    one of those (uniformly); every other case falls back to a tournament.

    Returns:
        The mate and whether the dominance-based rule was applied.
    """
    if strategy.uses_dominance and ranked.ranks[first_index] == 1:
        dominated = ranked.dominated_list(first_index)
        if dominated.size:
            return ranked[int(dominated[rng.integers(dominated.size)])], True
    return ranked[tournament_index(ranked, tournament_size, rng)], False


def phi_interval(strategy: MatingStrategy, dbx_applied: bool) -> tuple[float, float]:
    a = strategy.alpha
    if strategy.kind is MatingKind.BIASED_DBX and dbx_applied:
        return a, 1.0 + a
    return -a, 1.0 + a


def recombine(
    first: Individual,
    mate: Individual,
    strategy: MatingStrategy,
    dbx_applied: bool,
    rng: np.random.Generator,
    lower: np.ndarray | None = None,
    upper: np.ndarray | None = None,
) -> np.ndarray:
    low, high = phi_interval(strategy, dbx_applied)
    return blx_offspring(first.genome, mate.genome, low, high, rng, lower, upper)


def uniform_mutate(
    genome: np.ndarray,
    rate: float,
    lower: np.ndarray,
    upper: np.ndarray,
    rng: np.random.Generator,
) -> np.ndarray:
    """Resample each coordinate uniformly in its bounds with probability ``rate``."""
    if not 0.0 <= rate <= 1.0:
        raise ValueError(f"mutation rate must lie in [0, 1], got {rate}")
    genome = np.asarray(genome, dtype=float)
    hit = rng.random(genome.shape) < rate
    if not hit.any():
        return genome.copy()
    fresh = rng.uniform(lower, upper)
    return np.where(hit, fresh, genome)
