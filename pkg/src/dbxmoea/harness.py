"""Multi-run experiments with matched seeds, snapshots and result export.

Run ``r`` of every strategy uses seed ``base_seed + r``, so all strategies
start from the same initial populations. Output layout::

    <out>/<experiment>/<strategy>/run_<seed>.csv   per-generation instrumentation
    <out>/<experiment>/snapshots.csv               union-of-runs fronts
    <out>/<experiment>/summary.json                aggregates and comparisons
"""

from __future__ import annotations

import csv
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.stats import binomtest

from dbxmoea.metrics import generational_distance, hypervolume_2d
from dbxmoea.nsga2 import AlgorithmConfig, RunRecord, run
from dbxmoea.population import ConfigurationError
from dbxmoea.problems import Problem, nondominated_mask
from dbxmoea.variation import MatingStrategy, VariationConfig

__all__ = [
    "ExperimentError",
    "ExperimentResults",
    "ExperimentSpec",
    "RUN_COLUMNS",
    "SNAPSHOT_COLUMNS",
    "export_results",
    "generational_distance",
    "hypervolume_2d",
    "run_experiment",
    "sign_test",
    "union_front",
]

logger = logging.getLogger(__name__)

RUN_COLUMNS = (
    "generation",
    "non_dominated_count",
    "dbx_applications",
    "feasible_count",
    "hypervolume",
    "generational_distance",
)
SNAPSHOT_COLUMNS = ("f1", "f2", "strategy", "generation")


class ExperimentError(RuntimeError):
    """One or more runs of an experiment aborted."""

    def __init__(self, failures: list[tuple[str, int, str]]):
        self.failures = failures
        lines = [f"{strategy} seed={seed}: {msg}" for strategy, seed, msg in failures]
        super().__init__(f"{len(failures)} run(s) failed:\n" + "\n".join(lines))


@dataclass(frozen=True)
class ExperimentSpec:
    problem: Problem
    strategies: tuple[MatingStrategy, ...] = (MatingStrategy(),)
    runs: int = 31
    base_seed: int = 0
    population_size: int = 100
    tournament_size: int = 2
    generations: int | None = None
    variation: VariationConfig = field(default_factory=VariationConfig)
    snapshot_period: int = 10
    snapshot_generations: tuple[int, ...] | None = None
    comparison_generation: int = 30
    name: str | None = None
    parallel: int = 1
    dump_genomes: bool = False

    def __post_init__(self) -> None:
        if self.runs < 1:
            raise ConfigurationError(f"runs must be >= 1, got {self.runs}")
        if not self.strategies:
            raise ConfigurationError("at least one strategy is required")
        names = [s.name for s in self.strategies]
        if len(set(names)) != len(names):
            raise ConfigurationError(f"duplicate strategies: {names}")
        if self.snapshot_period < 1:
            raise ConfigurationError("snapshot period must be >= 1")
        if self.parallel < 1:
            raise ConfigurationError("parallel must be >= 1")
        # validates N, T, G and the seed range up front
        self.algorithm_config(self.strategies[0], self.base_seed)

    @property
    def experiment_name(self) -> str:
        return self.name or self.problem.name

    @property
    def total_generations(self) -> int:
        return self.generations or self.problem.default_generations

    @property
    def seeds(self) -> tuple[int, ...]:
        return tuple(self.base_seed + r for r in range(self.runs))

    @property
    def snapshots(self) -> tuple[int, ...]:
        G = self.total_generations
        if self.snapshot_generations is not None:
            return tuple(sorted(g for g in set(self.snapshot_generations) if 0 <= g <= G))
        return tuple(range(self.snapshot_period, G + 1, self.snapshot_period))

    def algorithm_config(self, strategy: MatingStrategy, seed: int) -> AlgorithmConfig:
        return AlgorithmConfig(
            population_size=self.population_size,
            tournament_size=self.tournament_size,
            generations=self.total_generations,
            strategy=strategy,
            variation=self.variation,
            seed=seed,
            snapshot_generations=self.snapshots,
        )


@dataclass
class ExperimentResults:
    spec: ExperimentSpec
    records: dict[str, list[RunRecord]]
    union_fronts: dict[tuple[str, int], np.ndarray]
    summary: dict


def union_front(fronts: list[np.ndarray]) -> np.ndarray:
    """Non-dominated subset of the union of several fronts."""
    stacked = np.vstack([f for f in fronts if f.size]) if fronts else np.empty((0, 2))
    if stacked.size == 0:
        return stacked.reshape(0, 2)
    return stacked[nondominated_mask(stacked)]


def sign_test(treatment: np.ndarray, baseline: np.ndarray) -> dict:
    """Paired sign test of ``treatment > baseline`` across matched seeds."""
    diff = np.asarray(treatment, dtype=float) - np.asarray(baseline, dtype=float)
    wins = int(np.sum(diff > 0))
    losses = int(np.sum(diff < 0))
    ties = int(diff.size - wins - losses)
    p_value = 1.0
    if wins + losses:
        p_value = float(binomtest(wins, wins + losses, 0.5).pvalue)
    return {"wins": wins, "losses": losses, "ties": ties, "p_value": p_value}


def _run_one(args: tuple[Problem, AlgorithmConfig]) -> RunRecord | str:
    problem, config = args
    try:
        return run(problem, config)
    except Exception as exc:  # reported per run by run_experiment
        return f"{type(exc).__name__}: {exc}"


def run_experiment(spec: ExperimentSpec) -> ExperimentResults:
    """Run every strategy on every seed and aggregate the results.

    Raises:
        ExperimentError: If any run aborted; lists every failing run.
    """
    jobs = [
        (spec.problem, spec.algorithm_config(strategy, seed))
        for strategy in spec.strategies
        for seed in spec.seeds
    ]
    if spec.parallel > 1:
        with ProcessPoolExecutor(max_workers=spec.parallel) as pool:
            outcomes = list(pool.map(_run_one, jobs))
    else:
        outcomes = [_run_one(job) for job in jobs]

    failures = []
    records: dict[str, list[RunRecord]] = {s.name: [] for s in spec.strategies}
    for (_, config), outcome in zip(jobs, outcomes):
        if isinstance(outcome, str):
            failures.append((config.strategy.name, config.seed, outcome))
        else:
            records[config.strategy.name].append(outcome)
    if failures:
        raise ExperimentError(failures)

    union_fronts = {
        (name, g): union_front([rec.snapshots[g] for rec in recs])
        for name, recs in records.items()
        for g in spec.snapshots
    }
    results = ExperimentResults(spec, records, union_fronts, summary={})
    results.summary = summarize(results)
    return results


def _median_series(recs: list[RunRecord], column: str) -> list[float]:
    return np.median(np.vstack([r.series(column) for r in recs]), axis=0).tolist()


def summarize(results: ExperimentResults) -> dict:
    spec = results.spec
    G = spec.total_generations
    baseline = spec.strategies[0].name
    strategies = {}
    for name, recs in results.records.items():
        hv = np.vstack([r.series("hypervolume") for r in recs])
        nd = np.vstack([r.series("non_dominated_count") for r in recs])
        full = [
            int(np.argmax(row == spec.population_size)) if np.any(row == spec.population_size) else None
            for row in nd
        ]
        strategies[name] = {
            "final_hypervolume_median": float(np.median(hv[:, -1])),
            "final_generational_distance_median": float(
                np.median([r.history[-1].generational_distance for r in recs])
            ),
            "dbx_applications_total": int(sum(r.series("dbx_applications").sum() for r in recs)),
            "first_generation_all_non_dominated": full,
            "hypervolume_decreases": [int(np.sum(np.diff(row) < 0)) for row in hv],
            "median_hypervolume": _median_series(recs, "hypervolume"),
            "median_non_dominated_count": _median_series(recs, "non_dominated_count"),
            "median_dbx_applications": _median_series(recs, "dbx_applications"),
            "median_feasible_count": _median_series(recs, "feasible_count"),
            "evaluations_per_run": recs[0].evaluations,
        }

    comparisons = []
    generations = sorted(set(spec.snapshots) | {min(spec.comparison_generation, G), G})
    base_recs = results.records[baseline]
    for strategy in spec.strategies[1:]:
        recs = results.records[strategy.name]
        for g in generations:
            treat = np.array([r.history[g].hypervolume for r in recs])
            base = np.array([r.history[g].hypervolume for r in base_recs])
            test = sign_test(treat, base)
            comparisons.append(
                {
                    "strategy": strategy.name,
                    "baseline": baseline,
                    "generation": g,
                    "median_hypervolume": float(np.median(treat)),
                    "baseline_median_hypervolume": float(np.median(base)),
                    "median_at_least_baseline": bool(np.median(treat) >= np.median(base)),
                    **test,
                }
            )

    return {
        "experiment": spec.experiment_name,
        "problem": spec.problem.name,
        "config": {
            "population_size": spec.population_size,
            "tournament_size": spec.tournament_size,
            "generations": G,
            "crossover_rate": spec.variation.crossover_rate,
            "mutation_rate": spec.variation.mutation_rate,
            "alpha": {s.name: s.alpha for s in spec.strategies},
            "runs": spec.runs,
            "seeds": list(spec.seeds),
            "snapshot_generations": list(spec.snapshots),
            "comparison_generation": spec.comparison_generation,
            "reference_point": list(spec.problem.reference_point),
            "dimension": spec.problem.dimension,
        },
        "strategies": strategies,
        "comparisons": comparisons,
    }


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def export_results(results: ExperimentResults, out_dir: str | Path) -> Path:
    """Write CSVs and the JSON summary; returns the experiment directory.

    Raises:
        OSError: If the directory or any file cannot be written.
    """
    spec = results.spec
    root = Path(out_dir) / spec.experiment_name
    root.mkdir(parents=True, exist_ok=True)
    for name, recs in results.records.items():
        strategy_dir = root / name
        strategy_dir.mkdir(exist_ok=True)
        for rec in recs:
            with open(strategy_dir / f"run_{rec.seed}.csv", "w", newline="") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(RUN_COLUMNS)
                for row in rec.history:
                    writer.writerow([_fmt(getattr(row, col)) for col in RUN_COLUMNS])
            if spec.dump_genomes:
                final = rec.final.population
                with open(strategy_dir / f"run_{rec.seed}_genomes.csv", "w", newline="") as fh:
                    writer = csv.writer(fh, lineterminator="\n")
                    writer.writerow([f"x{i + 1}" for i in range(spec.problem.dimension)] + ["rank"])
                    for ind in final:
                        writer.writerow([_fmt(v) for v in ind.genome.tolist()] + [ind.rank])

    with open(root / "snapshots.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SNAPSHOT_COLUMNS)
        for strategy in spec.strategies:
            for g in spec.snapshots:
                front = results.union_fronts[(strategy.name, g)]
                for f1, f2 in front[np.lexsort((front[:, 1], front[:, 0]))].tolist():
                    writer.writerow([_fmt(f1), _fmt(f2), strategy.name, g])

    with open(root / "summary.json", "w") as fh:
        json.dump(_jsonable(results.summary), fh, indent=2, sort_keys=True)
        fh.write("\n")
    logger.info("wrote %s", root)
    return root
