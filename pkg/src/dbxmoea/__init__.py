"""NSGA-II with standard BLX-alpha and dominance-based crossover (DBX)."""

from dbxmoea.dominance import (
    RankedPopulation,
    crowded_compare,
    crowding_distances,
    dominates,
    non_dominated_sort,
)
from dbxmoea.harness import ExperimentSpec, export_results, run_experiment
from dbxmoea.metrics import generational_distance, hypervolume_2d
from dbxmoea.nsga2 import AlgorithmConfig, RunRecord, run
from dbxmoea.population import (
    ConfigurationError,
    EvaluationError,
    Individual,
    Population,
    new_random_population,
)
from dbxmoea.problems import Problem, analytic_front, constrained_demo_problem, get_problem
from dbxmoea.variation import MatingStrategy, VariationConfig

__version__ = "0.1.0"
