import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fixtures import planted_fixture, separable_fixture
from peptide_mlp.data import FeatureSubset, LabeledDataset
from peptide_mlp.ga import GaConfig, crossover, fitness, ga_select, mutate

SMALL = GaConfig(population_size=40, generations=60, subset_size=5, seed=0)


def test_config_defaults_and_validation():
    cfg = GaConfig()
    assert (cfg.population_size, cfg.generations, cfg.subset_size) == (150, 250, 50)
    assert cfg.gene_mutation_rate == pytest.approx(0.02)
    assert GaConfig(subset_size=5, mutation_rate=0.3).gene_mutation_rate == 0.3
    with pytest.raises(ValueError):
        GaConfig(elite_count=200)
    with pytest.raises(ValueError):
        GaConfig(evaluator="svm")


# ---------------------------------------------------------------------------
# Operators

def test_crossover_identical_parents():
    p = FeatureSubset([1, 4, 9], 10)
    a, b = crossover(p, p, seed=3)
    assert a == p and b == p


def test_crossover_disjoint_parents():
    a, b = crossover(FeatureSubset([1, 2, 3], 10), FeatureSubset([4, 5, 6], 10), seed=0)
    for child in (a, b):
        assert len(child) == 3 and set(child) <= {1, 2, 3, 4, 5, 6}
    assert set(a) | set(b) == {1, 2, 3, 4, 5, 6}


def test_crossover_keeps_shared_genes():
    for seed in range(20):
        a, b = crossover(FeatureSubset([1, 2, 7], 10), FeatureSubset([1, 2, 8], 10), seed=seed)
        assert {1, 2} <= set(a) and {1, 2} <= set(b)
        assert {a.indices[-1], b.indices[-1]} == {7, 8}


def test_crossover_size_mismatch():
    with pytest.raises(ValueError):
        crossover(FeatureSubset([1], 5), FeatureSubset([1, 2], 5), seed=0)


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 60), st.integers(0, 2**32), st.data())
def test_crossover_properties(universe, seed, data):
    k = data.draw(st.integers(1, universe))
    rng = np.random.default_rng(seed)
    pa = FeatureSubset(rng.choice(universe, k, replace=False), universe)
    pb = FeatureSubset(rng.choice(universe, k, replace=False), universe)
    ca, cb = crossover(pa, pb, seed)
    assert len(ca) == len(cb) == k
    assert set(ca) | set(cb) <= set(pa) | set(pb)
    assert set(pa) & set(pb) <= set(ca) & set(cb)


def test_mutate_rate_zero_is_identity():
    s = FeatureSubset([0, 3, 5], 10)
    assert mutate(s, 10, 0.0, seed=1) == s


def test_mutate_rate_one_forced():
    for seed in range(10):
        assert mutate(FeatureSubset([0, 1], 4), 4, 1.0, seed=seed).indices == (2, 3)


def test_mutate_property_1000_trials():
    rng = np.random.default_rng(0)
    for trial in range(1000):
        universe = int(rng.integers(2, 80))
        k = int(rng.integers(1, universe + 1))
        s = FeatureSubset(rng.choice(universe, k, replace=False), universe)
        out = mutate(s, universe, float(rng.random()), seed=trial)
        assert len(out) == k
        assert len(set(out)) == k
        assert all(0 <= g < universe for g in out)


# ---------------------------------------------------------------------------
# Fitness

def test_fitness_separable_is_one():
    ds, planted = separable_fixture()
    assert fitness(FeatureSubset(planted, ds.n_features), ds, GaConfig(subset_size=3)) == 1.0


def test_fitness_shuffled_labels_near_chance():
    ds, planted = planted_fixture(seed=1)
    y = np.random.default_rng(5).permutation(ds.labels)
    shuffled = LabeledDataset(ds.values, y, ds.feature_ids, ds.sample_ids)
    score = fitness(FeatureSubset(planted, ds.n_features), shuffled, SMALL)
    assert abs(score - 0.5) <= 0.1


def test_fitness_deterministic_and_evaluators():
    ds, planted = planted_fixture(seed=2)
    sub = FeatureSubset(planted, ds.n_features)
    assert fitness(sub, ds, SMALL) == fitness(sub, ds, SMALL)
    lda = fitness(sub, ds, dataclasses.replace(SMALL, evaluator="lda"))
    nb = fitness(sub, ds, dataclasses.replace(SMALL, evaluator="nb"))
    assert fitness(sub, ds, SMALL) == pytest.approx((lda + nb) / 2, abs=1e-15)


def test_planted_beats_sampled_alternatives():
    # oracle behind the recovery threshold: no sampled subset outscores the planted one
    ds, planted = planted_fixture(seed=0)
    target = fitness(FeatureSubset(planted, ds.n_features), ds, SMALL)
    rng = np.random.default_rng(1)
    for _ in range(200):
        alt = FeatureSubset(rng.choice(ds.n_features, 5, replace=False), ds.n_features)
        if set(alt) != set(planted):
            assert fitness(alt, ds, SMALL) < target


# ---------------------------------------------------------------------------
# Search

def test_forced_case_returns_full_set():
    ds, _ = separable_fixture(n_features=4, planted=(1,))
    best, hist = ga_select(ds, GaConfig(population_size=6, generations=50, subset_size=4, elite_count=1))
    assert best.indices == (0, 1, 2, 3)
    assert len(hist) == 1


def test_subset_larger_than_universe():
    ds, _ = separable_fixture(n_features=4, planted=(1,))
    with pytest.raises(ValueError, match="exceeds"):
        ga_select(ds, GaConfig(subset_size=5))


def test_deterministic_and_thread_independent():
    ds, _ = planted_fixture(seed=3)
    cfg = dataclasses.replace(SMALL, generations=8)
    a, ha = ga_select(ds, cfg)
    b, hb = ga_select(ds, cfg)
    c, hc = ga_select(ds, cfg, threads=3)
    assert a == b == c
    assert ha == hb == hc


def test_planted_recovery_and_invariants():
    ds, planted = planted_fixture(seed=0)
    seen = []

    def progress(gen, population, fit_values):
        assert len(population) == SMALL.population_size
        for chrom in population:
            assert len(chrom) == 5 and len(set(chrom)) == 5
            assert all(0 <= g < ds.n_features for g in chrom)
        seen.append(gen)

    best, hist = ga_select(ds, SMALL, progress=progress)
    assert seen == list(range(60))
    assert len(set(best) & set(planted)) >= 4
    assert all(b2 >= b1 for b1, b2 in zip(hist.best_fitness, hist.best_fitness[1:]))
    assert hist.best_chromosome[-1] == best

    rng = np.random.default_rng(9)
    baseline = np.mean([fitness(FeatureSubset(rng.choice(100, 5, replace=False), 100), ds, SMALL)
                        for _ in range(20)])
    assert hist.best_fitness[-1] >= baseline + 0.2
