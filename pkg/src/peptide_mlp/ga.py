"""Genetic-algorithm wrapper search for a fixed-size feature subset.

A chromosome is a sorted tuple of ``subset_size`` distinct column indices.
Its fitness is the mean stratified cross-validated accuracy of a linear
classifier (LDA, pooled-variance Naive Bayes, or the mean of both) trained
on just those columns.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._seed import mix, rng_for
from .data import FeatureSubset, LabeledDataset, stratified_kfold
from .linear import lda_fit, lda_predict, nb_fit, nb_predict

log = logging.getLogger(__name__)

EVALUATORS = ("lda", "nb", "mean_of_both")


@dataclass(frozen=True)
class GaConfig:
    population_size: int = 150
    generations: int = 250
    subset_size: int = 50
    crossover_rate: float = 0.9
    mutation_rate: Optional[float] = None  # None -> 1 / subset_size
    tournament_size: int = 3
    elite_count: int = 2
    fitness_folds: int = 3
    evaluator: str = "mean_of_both"
    seed: int = 0

    def problems(self) -> list[str]:
        """Every violated constraint, as ``field: reason`` strings."""
        out = []
        if self.population_size < 2:
            out.append("population_size: must be >= 2")
        if self.generations < 1:
            out.append("generations: must be >= 1")
        if self.subset_size < 1:
            out.append("subset_size: must be >= 1")
        for name in ("crossover_rate", "mutation_rate"):
            v = getattr(self, name)
            if v is not None and not 0.0 <= v <= 1.0:
                out.append(f"{name}: must lie in [0, 1]")
        if self.tournament_size < 1:
            out.append("tournament_size: must be >= 1")
        if not 0 <= self.elite_count <= self.population_size:
            out.append("elite_count: must lie in [0, population_size]")
        if self.fitness_folds < 2:
            out.append("fitness_folds: must be >= 2")
        if self.evaluator not in EVALUATORS:
            out.append(f"evaluator: must be one of {', '.join(EVALUATORS)}")
        return out

    def __post_init__(self):
        problems = self.problems()
        if problems:
            raise ValueError("invalid GaConfig: " + "; ".join(problems))

    @property
    def gene_mutation_rate(self) -> float:
        """Per-gene rate; one expected replacement per chromosome by default."""
        if self.mutation_rate is None:
            return 1.0 / self.subset_size
        return self.mutation_rate


@dataclass
class GaHistory:
    best_fitness: list = field(default_factory=list)
    mean_fitness: list = field(default_factory=list)
    best_chromosome: list = field(default_factory=list)

    def __len__(self):
        return len(self.best_fitness)


# ---------------------------------------------------------------------------
# Operators

def crossover(parent_a: FeatureSubset, parent_b: FeatureSubset, seed: int):
    """Subset-preserving crossover.

    Genes shared by both parents go to both children. The remaining genes of
    both parents are pooled, shuffled and split evenly between the children,
    so each child keeps the parents' cardinality.
    """
    if len(parent_a) != len(parent_b):
        raise ValueError("parents must have the same subset size")
    a, b = set(parent_a.indices), set(parent_b.indices)
    shared = a & b
    pool = np.array(sorted(a ^ b), dtype=np.intp)
    rng = np.random.Generator(np.random.PCG64(seed))
    pool = rng.permutation(pool)
    m = pool.size // 2
    child_a = FeatureSubset(tuple(shared) + tuple(pool[:m]), parent_a.universe_size)
    child_b = FeatureSubset(tuple(shared) + tuple(pool[m:]), parent_b.universe_size)
    return child_a, child_b


def _draw_replacement(rng, universe_size, excluded):
    free = universe_size - len(excluded)
    if free <= 0:
        return None
    if free * 4 >= universe_size:
        while True:
            g = int(rng.integers(universe_size))
            if g not in excluded:
                return g
    candidates = np.setdiff1d(np.arange(universe_size), np.fromiter(excluded, dtype=np.intp))
    return int(candidates[rng.integers(candidates.size)])


def mutate(subset: FeatureSubset, universe_size: int, rate: float, seed: int) -> FeatureSubset:
    """Replace each gene with probability ``rate`` by an index outside the subset.

    Replacements avoid both the original genes and those already drawn, so a
    rate of 1 moves the whole subset to unused indices whenever enough exist.
    """
    if rate <= 0:
        return subset
    rng = np.random.Generator(np.random.PCG64(seed))
    genes = list(subset.indices)
    excluded = set(genes)
    hits = rng.random(len(genes)) < rate
    for i in np.flatnonzero(hits):
        g = _draw_replacement(rng, universe_size, excluded)
        if g is None:
            break
        excluded.add(g)
        genes[i] = g
    return FeatureSubset(genes, universe_size)


# ---------------------------------------------------------------------------
# Fitness

def _cv_accuracy(X, y, plan, fit, predict):
    accs = []
    for train, test in plan.folds():
        model = fit(X[train], y[train])
        pred, _ = predict(model, X[test])
        accs.append(np.mean(pred == y[test]))
    return float(np.mean(accs))


def fitness(subset: FeatureSubset, data: LabeledDataset, cfg: GaConfig, plan=None) -> float:
    """Mean stratified CV accuracy of the configured evaluator on ``subset``.

    The fold plan depends only on ``cfg.seed`` so every chromosome of a run
    is scored on the same partitions.
    """
    if plan is None:
        plan = stratified_kfold(data.labels, cfg.fitness_folds, mix(cfg.seed, "ga_fitness_folds"))
    X = data.values[:, subset.as_array()]
    y = data.labels
    scores = []
    if cfg.evaluator in ("lda", "mean_of_both"):
        scores.append(_cv_accuracy(X, y, plan, lda_fit, lda_predict))
    if cfg.evaluator in ("nb", "mean_of_both"):
        scores.append(_cv_accuracy(X, y, plan, nb_fit, nb_predict))
    return float(np.mean(scores))


# ---------------------------------------------------------------------------
# Search

def _random_subset(rng, universe_size, k):
    return FeatureSubset(rng.choice(universe_size, size=k, replace=False), universe_size)


def _tournament(rng, fit_values, size):
    contenders = rng.integers(0, fit_values.size, size=size)
    # first maximum wins, which keeps the draw reproducible
    return int(contenders[np.argmax(fit_values[contenders])])


def ga_select(data: LabeledDataset, cfg: GaConfig, threads: int = 1, progress=None):
    """Run the GA and return ``(best_subset, history)``.

    ``data`` should already be standardized. Each generation: score the
    population, copy the ``elite_count`` best unchanged, then fill the rest
    with tournament-selected parents passed through crossover and mutation.
    The best chromosome ever scored is returned.

    Parameters
    ----------
    threads : int
        Worker threads for fitness evaluation. Results do not depend on it.
    progress : callable, optional
        Called as ``progress(generation, population, fitness_values)`` after
        each generation is scored.
    """
    d = data.n_features
    if cfg.subset_size > d:
        raise ValueError(f"subset_size {cfg.subset_size} exceeds the number of features {d}")
    counts = np.bincount(data.labels, minlength=2)
    if np.any(counts == 0):
        raise ValueError("GA fitness needs both classes present")

    plan = stratified_kfold(data.labels, cfg.fitness_folds, mix(cfg.seed, "ga_fitness_folds"))
    cache: dict = {}

    def score_all(population):
        todo = [c for c in dict.fromkeys(population) if c not in cache]
        if threads > 1 and len(todo) > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(lambda c: fitness(c, data, cfg, plan), todo))
        else:
            results = [fitness(c, data, cfg, plan) for c in todo]
        cache.update(zip(todo, results))
        return np.array([cache[c] for c in population])

    rng0 = rng_for(cfg.seed, "ga_init")
    population = [_random_subset(rng0, d, cfg.subset_size) for _ in range(cfg.population_size)]

    history = GaHistory()
    best, best_fit = None, -np.inf
    forced = cfg.subset_size == d
    generations = 1 if forced else cfg.generations

    for gen in range(generations):
        fit_values = score_all(population)
        i_best = int(np.argmax(fit_values))
        if fit_values[i_best] > best_fit:
            best, best_fit = population[i_best], float(fit_values[i_best])
        history.best_fitness.append(best_fit)
        history.mean_fitness.append(float(fit_values.mean()))
        history.best_chromosome.append(best)
        if progress is not None:
            progress(gen, population, fit_values)
        if gen == generations - 1:
            break

        rng = rng_for(cfg.seed, "ga_generation", gen)
        order = np.argsort(-fit_values, kind="stable")
        nxt = [population[i] for i in order[: cfg.elite_count]]
        while len(nxt) < cfg.population_size:
            pa = population[_tournament(rng, fit_values, cfg.tournament_size)]
            pb = population[_tournament(rng, fit_values, cfg.tournament_size)]
            op_seed = int(rng.integers(2**63))
            if rng.random() < cfg.crossover_rate:
                ca, cb = crossover(pa, pb, mix(op_seed, "crossover"))
            else:
                ca, cb = pa, pb
            nxt.append(mutate(ca, d, cfg.gene_mutation_rate, mix(op_seed, "mutate", 0)))
            if len(nxt) < cfg.population_size:
                nxt.append(mutate(cb, d, cfg.gene_mutation_rate, mix(op_seed, "mutate", 1)))
        population = nxt

    log.info("GA finished: best fitness %.4f after %d generations", best_fit, len(history))
    return best, history
