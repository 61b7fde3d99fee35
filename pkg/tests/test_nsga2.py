import numpy as np
import pytest

from conftest import make_individual
from dbxmoea.dominance import dominates, non_dominated_sort
from dbxmoea.nsga2 import AlgorithmConfig, make_offspring, replace, run
from dbxmoea.population import ConfigurationError, EvaluationError, Population
from dbxmoea.problems import Problem, get_problem
from dbxmoea.selection import tournament_index, tournament_select
from dbxmoea.variation import MatingStrategy, VariationConfig
from oracles import crowding_by_neighbours

ZDT1 = get_problem("zdt1")


def config(**kw):
    kw.setdefault("population_size", 20)
    kw.setdefault("generations", 10)
    if isinstance(kw.get("strategy"), str):
        kw["strategy"] = MatingStrategy.from_name(kw["strategy"])
    return AlgorithmConfig(**kw)


class ScriptedRng:
    """Stands in for a Generator inside tournament selection."""

    def __init__(self, draws):
        self.draws = list(draws)

    def integers(self, low, high, size):
        out, self.draws = self.draws[:size], self.draws[size:]
        return np.array(out)


def line_population(shift, ts, start=0):
    """Points (t + shift, 1 - t + shift); for t in [0, 1] each shift is one front."""
    return [
        make_individual([t + shift, 1.0 - t + shift], genome=[float(start + i)])
        for i, t in enumerate(ts)
    ]


class TestConfig:
    @pytest.mark.parametrize("kw", [
        {"population_size": 7}, {"population_size": 0}, {"tournament_size": 1},
        {"generations": 0}, {"seed": -1},
    ])
    def test_invalid(self, kw):
        with pytest.raises(ConfigurationError):
            config(**kw)

    def test_defaults(self):
        c = AlgorithmConfig()
        assert (c.population_size, c.tournament_size, c.generations) == (100, 2, 150)
        assert c.variation == VariationConfig(0.9, 0.05)
        assert c.strategy.alpha == 0.5


class TestTournament:
    def ranked(self):
        # ranks: 0 -> 1, 1 -> 1, 2 -> 2, 3 -> 3
        pop = Population(tuple(
            make_individual(p, genome=[float(i)])
            for i, p in enumerate([[1, 5], [5, 1], [2, 6], [3, 7]])
        ))
        return non_dominated_sort(pop)

    def test_lower_rank_wins(self):
        ranked = self.ranked()
        assert tournament_index(ranked, 2, ScriptedRng([3, 0])) == 0
        assert tournament_index(ranked, 2, ScriptedRng([0, 3])) == 0

    def test_same_candidate_twice(self):
        assert tournament_index(self.ranked(), 2, ScriptedRng([2, 2])) == 2

    def test_tie_goes_to_first_drawn(self):
        ranked = non_dominated_sort(Population(tuple(line_population(0.0, [0.0, 0.5, 1.0]))))
        # the two extremes both have infinite crowding
        assert tournament_index(ranked, 2, ScriptedRng([2, 0])) == 2
        assert tournament_index(ranked, 2, ScriptedRng([0, 2])) == 0

    def test_returns_member(self, rng):
        ranked = self.ranked()
        assert tournament_select(ranked, 2, rng) in ranked.population.members


class TestMakeOffspring:
    def setup_method(self):
        self.rng = np.random.default_rng(5)
        from dbxmoea.population import new_random_population

        self.ranked = non_dominated_sort(new_random_population(ZDT1, 20, self.rng))

    def test_no_crossover_gives_mutated_copies(self):
        c = config(variation=VariationConfig(0.0, 0.0), strategy="biased-dbx")
        kids, dbx, crossovers = make_offspring(self.ranked, ZDT1, c, self.rng)
        assert len(kids) == 20 and dbx == 0 and crossovers == 0
        parents = {tuple(ind.genome) for ind in self.ranked.population}
        assert all(tuple(k.genome) in parents for k in kids)

    def test_standard_blx_never_counts(self):
        _, dbx, crossovers = make_offspring(self.ranked, ZDT1, config(), self.rng)
        assert dbx == 0 and crossovers > 0

    def test_dbx_count_bounded_by_crossovers(self):
        for _ in range(10):
            _, dbx, crossovers = make_offspring(self.ranked, ZDT1, config(strategy="symmetric-dbx"), self.rng)
            assert 0 < dbx <= crossovers <= 20

    def test_no_dbx_when_everyone_is_non_dominated(self):
        genomes = np.zeros((20, 30))
        genomes[:, 0] = np.linspace(0, 1, 20)
        from dbxmoea.population import evaluate

        ranked = non_dominated_sort(Population(tuple(evaluate(ZDT1, g) for g in genomes)))
        assert ranked.all_non_dominated
        _, dbx, crossovers = make_offspring(ranked, ZDT1, config(strategy="biased-dbx"), self.rng)
        assert dbx == 0 and crossovers > 0


class TestReplace:
    def test_elitism(self):
        parents = Population(tuple(line_population(0.0, np.linspace(0, 1, 10))))
        offspring = Population(tuple(line_population(1.0, np.linspace(0, 1, 10), start=10)))
        survivors = replace(parents, offspring)
        assert sorted(int(ind.genome[0]) for ind in survivors.population) == list(range(10))

    def test_offspring_take_over(self):
        parents = Population(tuple(line_population(1.0, np.linspace(0, 1, 10))))
        offspring = Population(tuple(line_population(0.0, np.linspace(0, 1, 10), start=10)))
        survivors = replace(parents, offspring)
        assert sorted(int(ind.genome[0]) for ind in survivors.population) == list(range(10, 20))

    def test_split_front_truncated_by_crowding(self, rng):
        t1, t2, t3 = rng.random(60), rng.random(80), rng.random(60)
        front1 = line_population(0.0, t1)
        front2 = line_population(1.0, t2, start=60)
        front3 = line_population(2.0, t3, start=140)
        parents = Population(tuple(front1 + front2[:40]))
        offspring = Population(tuple(front2[40:] + front3))
        survivors = replace(parents, offspring)

        crowd = crowding_by_neighbours([ind.objectives.tolist() for ind in front2])
        best40 = sorted(np.argsort(-np.array(crowd), kind="stable")[:40] + 60)
        kept = sorted(int(ind.genome[0]) for ind in survivors.population)
        assert len(kept) == 100
        assert kept == list(range(60)) + [int(i) for i in best40]

    def test_result_is_reranked(self, rng):
        parents = Population(tuple(line_population(0.0, rng.random(10))))
        offspring = Population(tuple(line_population(1.0, rng.random(10), start=10)))
        survivors = replace(parents, offspring)
        assert survivors.ranks.tolist() == [1] * 10
        again = non_dominated_sort(survivors.population)
        np.testing.assert_array_equal(again.crowding, survivors.crowding)


class TestRun:
    def test_one_generation(self):
        rec = run(ZDT1, config(generations=1))
        assert [row.generation for row in rec.history] == [0, 1]
        assert rec.evaluations == 40

    def test_determinism(self):
        a = run(ZDT1, config(strategy="biased-dbx", seed=3))
        b = run(ZDT1, config(strategy="biased-dbx", seed=3))
        assert a.history == b.history
        np.testing.assert_array_equal(a.final.population.genomes, b.final.population.genomes)

    def test_matched_initial_population_across_strategies(self):
        a = run(ZDT1, config(strategy="blx", seed=9, generations=2))
        b = run(ZDT1, config(strategy="biased-dbx", seed=9, generations=2))
        np.testing.assert_array_equal(a.initial.genomes, b.initial.genomes)

    def test_evaluation_count_and_population_size(self):
        sizes = []
        rec = run(ZDT1, config(generations=7), sink=lambda g, ranked, s: sizes.append(len(ranked)))
        assert rec.evaluations == 20 + 20 * 7
        assert sizes == [20] * 8

    @pytest.mark.parametrize("strategy", ["blx", "symmetric-dbx", "biased-dbx"])
    def test_elitism_by_brute_force(self, strategy):
        generations = []
        run(ZDT1, config(strategy=strategy, generations=25, seed=1),
            sink=lambda g, ranked, s: generations.append(ranked))
        for prev, nxt in zip(generations, generations[1:]):
            for i in nxt.first_front:
                assert not any(dominates(p, nxt[i]) for p in prev.population)

    @pytest.mark.parametrize("strategy", ["symmetric-dbx", "biased-dbx"])
    def test_dbx_instrumentation_invariants(self, strategy):
        rec = run(ZDT1, config(strategy=strategy, population_size=40, generations=80, seed=2))
        nd = rec.series("non_dominated_count")
        dbx = rec.series("dbx_applications")
        cx = rec.series("crossover_events")
        assert np.all(dbx <= cx)
        assert dbx[1:][nd[:-1] == 40].sum() == 0
        assert dbx.sum() > 0

    def test_hypervolume_drops_only_after_front_truncation(self):
        # hypervolume can only fall when the merged rank-1 set overflowed N
        rec = run(ZDT1, config(population_size=40, generations=120, seed=4))
        hv = rec.series("hypervolume")
        nd = rec.series("non_dominated_count")
        drops = np.flatnonzero(np.diff(hv) < 0) + 1
        assert np.all(nd[drops] == 40)

    def test_snapshots(self):
        rec = run(ZDT1, config(snapshot_generations=(0, 5, 10)))
        assert sorted(rec.snapshots) == [0, 5, 10]
        assert rec.snapshots[10].shape == (rec.history[10].non_dominated_count, 2)

    def test_nan_aborts(self):
        def bad(x):
            return np.array([x[0], np.nan if x[0] > 0.99 else 1.0])

        p = Problem("bad", np.zeros(2), np.ones(2), bad)
        with pytest.raises(EvaluationError):
            run(p, config(generations=200, variation=VariationConfig(0.9, 0.5)))
