"""Command-line entry point.

Examples::

    dbxmoea list-problems
    dbxmoea run --problem zdt1 --strategy biased-dbx --seed 7
    dbxmoea experiment --problem zdt1 --strategies blx,biased-dbx --runs 31 --seed 42 --out results/

Options may also come from a ``key = value`` file given with ``--config``;
keys are the long option names (``-`` or ``_``). Command-line flags win.
"""

from __future__ import annotations

import argparse
import configparser
import json
import logging
import os
import sys
from dataclasses import asdict, dataclass

from dbxmoea.harness import ExperimentError, ExperimentSpec, export_results, run_experiment
from dbxmoea.population import ConfigurationError
from dbxmoea.problems import PROBLEM_NAMES, SNAPSHOT_PRESETS, get_problem
from dbxmoea.variation import STRATEGY_NAMES, MatingStrategy, VariationConfig

OUT_ENV = "DBXMOEA_OUT"
EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2

logger = logging.getLogger("dbxmoea")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class CliConfig:
    command: str
    problem: str = "zdt1"
    strategies: tuple[str, ...] = ("blx",)
    population_size: int = 100
    tournament_size: int = 2
    generations: int | None = None
    alpha: float = 0.5
    crossover_rate: float = 0.9
    mutation_rate: float = 0.05
    runs: int = 31
    seed: int = 0
    snapshot_period: int = 10
    snapshot_preset: str | None = None
    dimension: int = 30
    constraint_scales: tuple[float, ...] | None = None
    out: str = "results"
    name: str | None = None
    parallel: int = 1
    dump_genomes: bool = False
    dry_run: bool = False

    def experiment_spec(self) -> ExperimentSpec:
        problem = get_problem(self.problem, self.dimension, self.constraint_scales)
        snapshots = None
        if self.snapshot_preset == "paper":
            snapshots = SNAPSHOT_PRESETS.get(problem.name, ())
        return ExperimentSpec(
            problem=problem,
            strategies=tuple(MatingStrategy.from_name(s, self.alpha) for s in self.strategies),
            runs=self.runs,
            base_seed=self.seed,
            population_size=self.population_size,
            tournament_size=self.tournament_size,
            generations=self.generations,
            variation=VariationConfig(self.crossover_rate, self.mutation_rate),
            snapshot_period=self.snapshot_period,
            snapshot_generations=snapshots,
            name=self.name,
            parallel=self.parallel,
            dump_genomes=self.dump_genomes,
        )


def _csv_list(text: str) -> tuple[str, ...]:
    items = tuple(s.strip() for s in text.split(",") if s.strip())
    if not items:
        raise argparse.ArgumentTypeError("expected a comma-separated list")
    return items


def _float_list(text: str) -> tuple[float, ...]:
    return tuple(float(s) for s in _csv_list(text))


def _bool(text: str) -> bool:
    lowered = str(text).strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


# option name -> (type, help); defaults live on CliConfig
_OPTIONS = {
    "problem": (str, f"one of {', '.join(PROBLEM_NAMES)}"),
    "population-size": (int, "population size N (even)"),
    "tournament-size": (int, "tournament size T"),
    "generations": (int, "generations G (default 150 for ZDT, 250 for constr)"),
    "alpha": (float, "BLX spread alpha in (0, 1)"),
    "crossover-rate": (float, "probability of recombination per offspring"),
    "mutation-rate": (float, "per-gene uniform mutation probability"),
    "seed": (int, "base seed; run r uses seed + r"),
    "snapshot-period": (int, "snapshot every this many generations"),
    "snapshot-preset": (str, "'paper' for the published per-problem schedule"),
    "dimension": (int, "ZDT decision-space dimension"),
    "constraint-scales": (_float_list, "comma-separated constraint scale factors"),
    "out": (str, f"output directory (default ${OUT_ENV} or ./results)"),
    "name": (str, "experiment directory name (default: problem name)"),
    "parallel": (int, "number of runs executed concurrently"),
}
_EXPERIMENT_ONLY = {
    "runs": (int, "number of matched-seed runs per strategy"),
    "strategies": (_csv_list, f"comma-separated, from {', '.join(STRATEGY_NAMES)}"),
}
_RUN_ONLY = {
    "strategy": (str, f"one of {', '.join(STRATEGY_NAMES)}"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dbxmoea",
        description="NSGA-II with standard BLX and dominance-based crossover.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("list-problems", help="list available problems")
    for command, extra, help_text in (
        ("run", _RUN_ONLY, "a single run"),
        ("experiment", _EXPERIMENT_ONLY, "matched-seed multi-run comparison"),
    ):
        p = sub.add_parser(command, help=help_text)
        for option, (kind, option_help) in {**_OPTIONS, **extra}.items():
            p.add_argument(f"--{option}", type=kind, default=None, help=option_help)
        p.add_argument("--config", default=None, help="key = value configuration file")
        p.add_argument("--dump-genomes", action="store_true", default=None,
                       help="also write final genomes per run")
        p.add_argument("--dry-run", action="store_true", default=None,
                       help="print the resolved configuration and exit")
    return parser


def _read_config_file(path: str, allowed: dict) -> dict:
    parser = configparser.ConfigParser()
    try:
        with open(path) as fh:
            parser.read_string("[config]\n" + fh.read())
    except (OSError, configparser.Error) as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    values = {}
    for key, raw in parser["config"].items():
        option = key.replace("_", "-")
        if option in ("dump-genomes", "dry-run"):
            kind = _bool
        elif option in allowed:
            kind = allowed[option][0]
        else:
            raise UsageError(f"{path}: unknown key {key!r}")
        try:
            values[option] = kind(raw)
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise UsageError(f"{path}: invalid value for {key!r}: {exc}") from exc
    return values


def parse_and_validate(argv: list[str] | None = None) -> CliConfig:
    """Parse ``argv`` into a validated CliConfig.

    Raises:
        UsageError: For unknown names, invalid numbers or unreadable config.
        SystemExit: From argparse on malformed flags (status 2).
    """
    args = build_parser().parse_args(argv)
    if args.command == "list-problems":
        return CliConfig(command="list-problems")

    allowed = {**_OPTIONS, **(_RUN_ONLY if args.command == "run" else _EXPERIMENT_ONLY)}
    from_file = _read_config_file(args.config, allowed) if args.config else {}
    merged = {}
    for option in [*allowed, "dump-genomes", "dry-run"]:
        value = getattr(args, option.replace("-", "_"))
        if value is None:
            value = from_file.get(option)
        if value is not None:
            merged[option.replace("-", "_")] = value

    if args.command == "run":
        merged["strategies"] = (merged.pop("strategy", "blx"),)
        merged["runs"] = 1
    elif "strategies" not in merged:
        merged["strategies"] = STRATEGY_NAMES
    merged.setdefault("out", os.environ.get(OUT_ENV) or "results")

    config = CliConfig(command=args.command, **merged)
    if config.problem.lower() not in PROBLEM_NAMES:
        raise UsageError(f"--problem: unknown problem {config.problem!r}")
    for strategy in config.strategies:
        if strategy.lower() not in STRATEGY_NAMES:
            raise UsageError(f"--strategies: unknown strategy {strategy!r}")
    if config.snapshot_preset not in (None, "paper"):
        raise UsageError(f"--snapshot-preset: expected 'paper', got {config.snapshot_preset!r}")
    try:
        config.experiment_spec()
    except ConfigurationError as exc:
        raise UsageError(str(exc)) from exc
    return config


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        config = parse_and_validate(argv)
    except UsageError as exc:
        print(f"dbxmoea: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE

    logging.basicConfig(
        level=logging.DEBUG if ("-v" in argv or "--verbose" in argv) else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if config.command == "list-problems":
        for name in PROBLEM_NAMES:
            problem = get_problem(name)
            kind = "constrained" if problem.constrained else "unconstrained"
            print(f"{name}\tn={problem.dimension}\t{kind}\tG={problem.default_generations}")
        return EXIT_OK

    spec = config.experiment_spec()
    if config.dry_run:
        resolved = asdict(config)
        resolved["generations"] = spec.total_generations
        resolved["snapshot_generations"] = list(spec.snapshots)
        print(json.dumps(resolved, indent=2, sort_keys=True))
        return EXIT_OK

    try:
        results = run_experiment(spec)
        root = export_results(results, config.out)
    except ExperimentError as exc:
        print(f"dbxmoea: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except OSError as exc:
        print(f"dbxmoea: cannot write results: {exc}", file=sys.stderr)
        return EXIT_FAILURE

    for name, records in results.records.items():
        for rec in records:
            last = rec.history[-1]
            print(
                f"{spec.problem.name} {name} seed={rec.seed} generations={last.generation} "
                f"hypervolume={last.hypervolume:.6f} gd={last.generational_distance:.6f} "
                f"non_dominated={last.non_dominated_count}"
            )
    print(f"results written to {root}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
