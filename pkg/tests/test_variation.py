import numpy as np
import pytest

from conftest import make_individual
from dbxmoea.dominance import non_dominated_sort
from dbxmoea.population import ConfigurationError, Population
from dbxmoea.variation import (
    MatingKind,
    MatingStrategy,
    VariationConfig,
    blx_offspring,
    choose_mate,
    phi_interval,
    recombine,
    uniform_mutate,
)

BLX = MatingStrategy.from_name("blx")
SYM = MatingStrategy.from_name("symmetric-dbx")
BIASED = MatingStrategy.from_name("biased-dbx")


def ranked_of(points):
    pop = Population(tuple(make_individual(p, genome=[float(i)]) for i, p in enumerate(points)))
    return non_dominated_sort(pop)


class TestConfig:
    def test_defaults(self):
        assert BLX.alpha == 0.5
        cfg = VariationConfig()
        assert (cfg.crossover_rate, cfg.mutation_rate) == (0.9, 0.05)

    @pytest.mark.parametrize("alpha", [0.0, 1.0, -0.1, 1.5])
    def test_alpha_open_interval(self, alpha):
        with pytest.raises(ConfigurationError):
            MatingStrategy(MatingKind.BIASED_DBX, alpha)

    def test_unknown_name(self):
        with pytest.raises(ConfigurationError):
            MatingStrategy.from_name("sbx")

    @pytest.mark.parametrize("rates", [(1.1, 0.05), (0.9, -0.01)])
    def test_rates_are_probabilities(self, rates):
        with pytest.raises(ConfigurationError):
            VariationConfig(*rates)

    def test_phi_intervals(self):
        assert phi_interval(BLX, False) == (-0.5, 1.5)
        assert phi_interval(SYM, True) == (-0.5, 1.5)
        assert phi_interval(BIASED, True) == (0.5, 1.5)
        assert phi_interval(BIASED, False) == (-0.5, 1.5)
        assert phi_interval(MatingStrategy(MatingKind.BIASED_DBX, 0.25), True) == (0.25, 1.25)


class TestBlx:
    def test_identical_parents(self, rng):
        g = rng.random(30)
        for low, high in [(-0.5, 1.5), (0.5, 1.5)]:
            np.testing.assert_allclose(blx_offspring(g, g, low, high, rng), g, rtol=0, atol=1e-15)

    def test_degenerate_endpoints(self, rng):
        x, y = rng.random(10), rng.random(10)
        np.testing.assert_array_equal(blx_offspring(x, y, 1.0, 1.0, rng), x)
        np.testing.assert_array_equal(blx_offspring(x, y, 0.0, 0.0, rng), y)

    def test_dimension_mismatch(self, rng):
        with pytest.raises(ValueError):
            blx_offspring(np.zeros(3), np.zeros(4), -0.5, 1.5, rng)

    def test_symmetric_range_and_mean(self, rng):
        x, y = np.array([0.2]), np.array([0.8])
        raw = np.array([blx_offspring(x, y, -0.5, 1.5, rng)[0] for _ in range(100_000)])
        assert raw.min() >= -0.1 - 1e-12 and raw.max() <= 1.1 + 1e-12
        assert abs(raw.mean() - 0.5) < 0.01
        clipped = np.array(
            [blx_offspring(x, y, -0.5, 1.5, rng, np.zeros(1), np.ones(1))[0] for _ in range(20_000)]
        )
        assert clipped.min() >= 0.0 and clipped.max() <= 1.0

    def test_classical_blx_interval(self, rng):
        x, y = np.array([0.3, 0.9]), np.array([0.7, 0.1])
        lo = np.minimum(x, y) - 0.5 * np.abs(x - y)
        hi = np.maximum(x, y) + 0.5 * np.abs(x - y)
        kids = np.array([recombine(make_individual([0, 0], x), make_individual([0, 0], y), BLX,
                                   False, rng) for _ in range(20_000)])
        assert np.all(kids >= lo - 1e-12) and np.all(kids <= hi + 1e-12)
        # the interval is attained: samples reach within 1% of each end
        np.testing.assert_allclose(kids.min(axis=0), lo, atol=0.01)
        np.testing.assert_allclose(kids.max(axis=0), hi, atol=0.01)


class TestRecombine:
    def test_biased_concentrates_near_dominant_parent(self, rng):
        n = 5
        x = make_individual([0, 0], np.zeros(n))
        y = make_individual([1, 1], np.ones(n))
        kids = np.array([recombine(x, y, BIASED, True, rng) for _ in range(100_000)])
        np.testing.assert_allclose(kids.mean(axis=0), 0.0, atol=0.01)
        assert kids.min() >= -0.5 - 1e-12 and kids.max() <= 0.5 + 1e-12

    def test_symmetric_identical_parents(self, rng):
        g = rng.random(8)
        a, b = make_individual([0, 0], g), make_individual([0, 0], g.copy())
        np.testing.assert_allclose(recombine(a, b, SYM, True, rng), g, atol=1e-15)

    def test_bounds_containment(self, rng):
        lower, upper = np.zeros(4), np.ones(4)
        for strategy in (BLX, SYM, BIASED):
            for applied in (False, True):
                for _ in range(5_000):
                    a = make_individual([0, 0], rng.random(4))
                    b = make_individual([0, 0], rng.random(4))
                    c = recombine(a, b, strategy, applied, rng, lower, upper)
                    assert np.all(c >= lower) and np.all(c <= upper)


class TestChooseMate:
    def test_dbx_picks_the_dominated_individual(self, rng):
        # index 0 dominates only index 2; index 1 is incomparable with both
        ranked = ranked_of([[1, 5], [5, 1], [2, 6]])
        for _ in range(50):
            mate, applied = choose_mate(0, ranked, SYM, rng)
            assert applied
            assert mate is ranked[2]

    def test_rank_two_falls_back_to_tournament(self, rng):
        ranked = ranked_of([[1, 5], [5, 1], [2, 6], [3, 7]])
        assert ranked.ranks[2] == 2 and ranked.dominated_list(2).size == 1
        for _ in range(50):
            _, applied = choose_mate(2, ranked, BIASED, rng)
            assert not applied

    def test_standard_blx_never_applies(self, rng):
        ranked = ranked_of([[1, 5], [5, 1], [2, 6]])
        assert not any(choose_mate(0, ranked, BLX, rng)[1] for _ in range(50))

    def test_mutually_non_dominated_population(self, rng):
        ranked = ranked_of([[i, 20 - i] for i in range(21)])
        for i in range(21):
            assert not choose_mate(i, ranked, BIASED, rng)[1]

    def test_mate_uniform_over_dominated_list(self, rng):
        ranked = ranked_of([[0, 0], [1, 2], [2, 1], [3, 3]])
        counts = np.zeros(4)
        for _ in range(6_000):
            mate, applied = choose_mate(0, ranked, BIASED, rng)
            assert applied
            counts[int(mate.genome[0])] += 1
        assert counts[0] == 0
        np.testing.assert_allclose(counts[1:] / 6_000, 1 / 3, atol=0.03)


class TestMutation:
    def test_rate_zero_is_identity(self, rng):
        g = rng.random(30)
        np.testing.assert_array_equal(uniform_mutate(g, 0.0, np.zeros(30), np.ones(30), rng), g)

    def test_rate_one_resamples_in_bounds(self, rng):
        g = np.full(30, 0.5)
        lower, upper = np.full(30, 2.0), np.full(30, 3.0)
        m = uniform_mutate(g, 1.0, lower, upper, rng)
        assert np.all((m >= 2.0) & (m <= 3.0))

    def test_expected_mutation_count(self, rng):
        g = np.full(30, 0.5)
        lower, upper = np.zeros(30), np.ones(30)
        changed = [np.count_nonzero(uniform_mutate(g, 0.05, lower, upper, rng) != g) for _ in range(10_000)]
        assert abs(np.mean(changed) - 1.5) < 0.05
