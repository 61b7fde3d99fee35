"""Benchmark problems: ZDT1-3 and a constrained two-objective instance.

All objectives are minimized. Constrained problems report an aggregated,
scaled violation ("infeasibility") alongside the objectives; it takes strict
priority over the objectives in the dominance test.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from dbxmoea.population import ConfigurationError

ZDT_DIMENSION = 30

# hypervolume reference points; early ZDT populations have g close to 10
ZDT_REFERENCE = (1.1, 11.0)
CONSTR_REFERENCE = (1.1, 61.0)

# Snapshot schedules used for the published ZDT figures.
SNAPSHOT_PRESETS = {
    "zdt1": (10, 20, 30, 40),
    "zdt2": (20, 30, 40, 50),
    "zdt3": (10, 20, 30, 40),
}


@dataclass(frozen=True)
class InfeasibilityAggregator:
    """Sum of constraint violations, each divided by its scale factor."""

    scales: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.scales or any(s <= 0 for s in self.scales):
            raise ConfigurationError(f"constraint scales must be positive: {self.scales}")

    def __call__(self, violations: np.ndarray) -> float:
        violations = np.asarray(violations, dtype=float)
        if violations.shape != (len(self.scales),):
            raise ValueError(
                f"expected {len(self.scales)} violations, got shape {violations.shape}"
            )
        if np.any(violations < 0):
            raise ValueError(f"violations must be non-negative: {violations}")
        return float(np.sum(violations / np.asarray(self.scales)))


@dataclass(frozen=True, eq=False)
class Problem:
    """A box-bounded multi-objective problem.

    ``objective_fn`` maps a genome to an objective vector. When
    ``constraint_fn`` is given it returns non-negative violation magnitudes
    which ``aggregator`` folds into a single infeasibility value.
    """

    name: str
    lower: np.ndarray
    upper: np.ndarray
    objective_fn: Callable[[np.ndarray], np.ndarray]
    n_objectives: int = 2
    constraint_fn: Callable[[np.ndarray], np.ndarray] | None = None
    aggregator: InfeasibilityAggregator | None = None
    front_fn: Callable[[int], np.ndarray] | None = None
    reference_point: tuple[float, float] = ZDT_REFERENCE
    default_generations: int = 150
    snapshot_preset: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        if lower.ndim != 1 or lower.shape != upper.shape or np.any(lower >= upper):
            raise ConfigurationError(f"{self.name}: bounds must satisfy lo_i < hi_i")
        lower.setflags(write=False)
        upper.setflags(write=False)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if (self.constraint_fn is None) != (self.aggregator is None):
            raise ConfigurationError(
                f"{self.name}: constraint_fn and aggregator go together"
            )

    @property
    def dimension(self) -> int:
        return self.lower.shape[0]

    @property
    def constrained(self) -> bool:
        return self.constraint_fn is not None

    def evaluate(self, genome: np.ndarray) -> tuple[np.ndarray, float | None]:
        objectives = np.asarray(self.objective_fn(genome), dtype=float)
        if objectives.shape != (self.n_objectives,):
            raise ValueError(
                f"{self.name}: objective vector has shape {objectives.shape}"
            )
        if self.constraint_fn is None:
            return objectives, None
        return objectives, self.aggregator(self.constraint_fn(genome))


def _check_unit_box(x: np.ndarray) -> None:
    if x.min() < 0.0 or x.max() > 1.0:
        raise ValueError("ZDT genome outside [0, 1]^n")


def _zdt_g(x: np.ndarray) -> float:
    return 1.0 + 9.0 * float(np.sum(x[1:])) / (x.shape[0] - 1)


def zdt1(x: np.ndarray) -> np.ndarray:
    _check_unit_box(x)
    f1 = float(x[0])
    g = _zdt_g(x)
    return np.array([f1, g * (1.0 - np.sqrt(f1 / g))])


def zdt2(x: np.ndarray) -> np.ndarray:
    _check_unit_box(x)
    f1 = float(x[0])
    g = _zdt_g(x)
    return np.array([f1, g * (1.0 - (f1 / g) ** 2)])


def zdt3(x: np.ndarray) -> np.ndarray:
    _check_unit_box(x)
    f1 = float(x[0])
    g = _zdt_g(x)
    h = 1.0 - np.sqrt(f1 / g) - (f1 / g) * np.sin(10.0 * np.pi * f1)
    return np.array([f1, g * h])


def constr_objectives(x: np.ndarray) -> np.ndarray:
    return np.array([x[0], (1.0 + x[1]) / x[0]])


def constr_violations(x: np.ndarray) -> np.ndarray:
    # x2 + 9 x1 >= 6 and -x2 + 9 x1 >= 1
    return np.array(
        [max(0.0, 6.0 - x[1] - 9.0 * x[0]), max(0.0, 1.0 + x[1] - 9.0 * x[0])]
    )


def nondominated_mask(points: np.ndarray) -> np.ndarray:
    """Boolean mask of the points no other point Pareto-dominates.

    A sort-and-sweep for two objectives; the O(n^2) pairwise test otherwise.
    """
    points = np.asarray(points, dtype=float)
    n = points.shape[0]
    if n == 0:
        return np.zeros(0, dtype=bool)
    if points.shape[1] == 2:
        order = np.lexsort((points[:, 1], points[:, 0]))
        keep = np.zeros(n, dtype=bool)
        # running min of f2 and the smallest f1 at which it was attained
        min_f2, min_f1 = np.inf, np.inf
        for idx in order:
            f1, f2 = points[idx]
            if f2 < min_f2:
                keep[idx] = True
                min_f2, min_f1 = f2, f1
            elif f2 == min_f2 and f1 == min_f1:
                keep[idx] = True  # exact duplicate of a kept point
        return keep
    le = np.all(points[:, None, :] <= points[None, :, :], axis=2)
    lt = np.any(points[:, None, :] < points[None, :, :], axis=2)
    return ~np.any(le & lt, axis=0)


def _zdt1_front(samples: int) -> np.ndarray:
    t = np.linspace(0.0, 1.0, samples)
    return np.column_stack([t, 1.0 - np.sqrt(t)])


def _zdt2_front(samples: int) -> np.ndarray:
    t = np.linspace(0.0, 1.0, samples)
    return np.column_stack([t, 1.0 - t**2])


def _zdt3_front(samples: int) -> np.ndarray:
    t = np.linspace(0.0, 1.0, samples)
    pts = np.column_stack([t, 1.0 - np.sqrt(t) - t * np.sin(10.0 * np.pi * t)])
    return pts[nondominated_mask(pts)]


def _constr_front(samples: int) -> np.ndarray:
    # x1 in [7/18, 2/3] with x2 = 6 - 9 x1, then x1 in [2/3, 1] with x2 = 0
    t = np.linspace(7.0 / 18.0, 1.0, samples)
    x2 = np.where(t < 2.0 / 3.0, 6.0 - 9.0 * t, 0.0)
    return np.column_stack([t, (1.0 + x2) / t])


def make_zdt(name: str, dimension: int = ZDT_DIMENSION) -> Problem:
    fns = {
        "zdt1": (zdt1, _zdt1_front),
        "zdt2": (zdt2, _zdt2_front),
        "zdt3": (zdt3, _zdt3_front),
    }
    if name not in fns:
        raise ConfigurationError(f"unknown problem {name!r}")
    if dimension < 2:
        raise ConfigurationError(f"ZDT dimension must be >= 2, got {dimension}")
    objective_fn, front_fn = fns[name]
    return Problem(
        name=name,
        lower=np.zeros(dimension),
        upper=np.ones(dimension),
        objective_fn=objective_fn,
        front_fn=front_fn,
        reference_point=ZDT_REFERENCE,
        default_generations=150,
        snapshot_preset=SNAPSHOT_PRESETS[name],
    )


def constrained_demo_problem(scales: tuple[float, float] = (1.0, 1.0)) -> Problem:
    """The classical CONSTR instance routed through the infeasibility aggregate."""
    return Problem(
        name="constr",
        lower=np.array([0.1, 0.0]),
        upper=np.array([1.0, 5.0]),
        objective_fn=constr_objectives,
        constraint_fn=constr_violations,
        aggregator=InfeasibilityAggregator(tuple(float(s) for s in scales)),
        front_fn=_constr_front,
        reference_point=CONSTR_REFERENCE,
        default_generations=250,
    )


PROBLEM_NAMES = ("zdt1", "zdt2", "zdt3", "constr")


def get_problem(name: str, dimension: int = ZDT_DIMENSION, scales=None) -> Problem:
    name = name.lower()
    if name == "constr":
        return constrained_demo_problem(tuple(scales) if scales else (1.0, 1.0))
    return make_zdt(name, dimension)


def analytic_front(problem: Problem, samples: int = 1000) -> np.ndarray:
    """Sample the known Pareto front of ``problem``, shape (k, 2).

    ZDT3's disconnected front is obtained by dense sampling of the boundary
    curve followed by non-dominated filtering; ``samples`` is the number of
    curve samples before filtering.
    """
    if samples < 2:
        raise ConfigurationError(f"samples must be >= 2, got {samples}")
    if problem.front_fn is None:
        raise ConfigurationError(f"no analytic front for problem {problem.name!r}")
    return problem.front_fn(samples)

