import math

import numpy as np
import pytest

from imcnas.space import (ArchGenome, BlockSpec, BlockType, DEFAULT_SPACE,
                          SearchSpace, sample_uniform, validate)
from imcnas.tpe import (TpeParams, categorical_posterior, random_suggest,
                        split_good_bad, tpe_suggest)


def genome(depth=3, bt=BlockType.MVGG, k=16):
    return ArchGenome(tuple(BlockSpec(bt, k) for _ in range(depth)))


class TestSplit:
    def test_quantile_rounding(self):
        history = [(genome(), float(i)) for i in range(30)]
        good, bad = split_good_bad(history, 0.25, 25)
        assert len(good) == 8  # ceil(7.5)
        assert len(bad) == 22

    def test_single_observation(self):
        good, bad = split_good_bad([(genome(), 0.5)], 0.25, 25)
        assert len(good) == 1 and bad == []

    def test_cap_binds(self):
        history = [(genome(), float(i)) for i in range(200)]
        good, _ = split_good_bad(history, 0.25, 25)
        assert len(good) == 25

    def test_ties_broken_by_earlier_index(self):
        g_early, g_late = genome(3), genome(4)
        history = [(g_early, 1.0), (g_late, 1.0), (genome(5), 0.0), (genome(6), 0.0)]
        good, _ = split_good_bad(history, 0.25, 25)
        assert good == [(g_early, 1.0)]

    def test_empty_history_rejected(self):
        with pytest.raises(ValueError):
            split_good_bad([], 0.25, 25)


class TestCategoricalPosterior:
    def test_observed_counts(self):
        values = [BlockType.VGG] * 6 + [BlockType.MVGG] + [BlockType.RES]
        p = categorical_posterior(values, [BlockType.VGG, BlockType.MVGG, BlockType.RES], 1.0)
        np.testing.assert_allclose(p, [6.333333333333334 / 9, 1.3333333333333333 / 9,
                                       1.3333333333333333 / 9], rtol=1e-12)
        assert p[0] == pytest.approx(0.7037, abs=1e-4)

    def test_no_observations_uniform(self):
        p = categorical_posterior([], ["a", "b", "c"], 1.0)
        np.testing.assert_allclose(p, [1 / 3] * 3)

    def test_concentrated_counts(self):
        p = categorical_posterior([64, 64, 64], [16, 32, 64], 1.0)
        np.testing.assert_allclose(p, [1 / 12, 1 / 12, 10 / 12], rtol=1e-12)
        assert p[2] == pytest.approx(0.8333, abs=1e-4)


def make_history(n_good_depth3, n_other, good_fitness=1.0, other_fitness=0.1,
                 good_bt1=None, seed=0):
    """History whose top quantile is exactly the depth-3 (or bt-tagged) set."""
    rng = np.random.default_rng(seed)
    history = []
    for i in range(n_good_depth3):
        bt1 = good_bt1[i % len(good_bt1)] if good_bt1 else BlockType.MVGG
        blocks = (BlockSpec(bt1, 16),) + tuple(
            BlockSpec(BlockType.MVGG, 16) for _ in range(2))
        history.append((ArchGenome(blocks), good_fitness))
    for _ in range(n_other):
        g = sample_uniform(SearchSpace(4, 8), rng)
        history.append((g, other_fitness))
    return history


class TestSuggest:
    def test_startup_equals_prior(self):
        params = TpeParams()
        for seed in range(5):
            a = tpe_suggest([], DEFAULT_SPACE, params, np.random.default_rng(seed))
            b = sample_uniform(DEFAULT_SPACE, np.random.default_rng(seed))
            assert a == b

    def test_random_suggest_is_uniform_alias(self):
        a = random_suggest(DEFAULT_SPACE, np.random.default_rng(9))
        b = sample_uniform(DEFAULT_SPACE, np.random.default_rng(9))
        assert a == b

    def test_determinism(self):
        history = make_history(10, 30)
        params = TpeParams()
        a = tpe_suggest(history, DEFAULT_SPACE, params, np.random.default_rng(3),
                        input_shape=(3, 32, 32))
        b = tpe_suggest(history, DEFAULT_SPACE, params, np.random.default_rng(3),
                        input_shape=(3, 32, 32))
        assert a == b

    def test_good_depth_concentration(self):
        """Good set all depth 3: suggested depth-3 frequency must clearly beat
        the uniform prior 1/6 (one-sided binomial, ~p<0.001)."""
        history = make_history(10, 30)
        params = TpeParams()
        n = 2000
        hits = sum(
            tpe_suggest(history, DEFAULT_SPACE, params,
                        np.random.default_rng(seed)).depth == 3
            for seed in range(n))
        p0 = 1 / 6
        threshold = n * p0 + 3.1 * math.sqrt(n * p0 * (1 - p0))
        assert hits > threshold, f"{hits}/{n}"

    def test_bt1_matches_good_density(self):
        """With a single candidate the suggestion is a draw from l; its BT1
        frequencies must match the categorical posterior within 3 sigma."""
        bt1_pattern = [BlockType.VGG] * 6 + [BlockType.MVGG, BlockType.RES]
        history = make_history(8, 22, good_bt1=bt1_pattern)
        good_genomes = [g for g, f in history if f == 1.0]
        expected = categorical_posterior(
            [g.blocks[0].block_type for g in good_genomes],
            list(DEFAULT_SPACE.allowed_types), 1.0)
        params = TpeParams(n_candidates=1)
        n = 5000
        counts = dict.fromkeys(DEFAULT_SPACE.allowed_types, 0)
        for seed in range(n):
            g = tpe_suggest(history, DEFAULT_SPACE, params, np.random.default_rng(seed))
            counts[g.blocks[0].block_type] += 1
        for bt, p in zip(DEFAULT_SPACE.allowed_types, expected):
            sigma = math.sqrt(n * p * (1 - p))
            assert abs(counts[bt] - n * p) < 3 * sigma, (bt, counts[bt], n * p)

    def test_huge_prior_weight_approaches_uniform(self):
        history = make_history(10, 30)
        params = TpeParams(n_candidates=1, prior_weight=1e9)
        n = 3000
        counts = dict.fromkeys(range(3, 9), 0)
        for seed in range(n):
            counts[tpe_suggest(history, DEFAULT_SPACE, params,
                               np.random.default_rng(seed)).depth] += 1
        p = 1 / 6
        sigma = math.sqrt(n * p * (1 - p))
        for d, c in counts.items():
            assert abs(c - n * p) < 4 * sigma, (d, c)

    def test_suggestions_valid_in_space_and_shape(self):
        history = make_history(10, 30)
        params = TpeParams()
        for seed in range(50):
            g = tpe_suggest(history, DEFAULT_SPACE, params,
                            np.random.default_rng(seed), input_shape=(1, 28, 28))
            assert DEFAULT_SPACE.contains(g)
            assert validate(g, (1, 28, 28))

    def test_params_validation(self):
        with pytest.raises(ValueError):
            TpeParams(gamma=0.0)
        with pytest.raises(ValueError):
            TpeParams(n_startup=0)
        with pytest.raises(ValueError):
            TpeParams(prior_weight=0.0)
