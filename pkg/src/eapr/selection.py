"""Wrapper feature selection with a genetic algorithm.

A subset's fitness is the mean cross-validated accuracy, over algorithms, of
a linear SVM trained on the subset's 2D PCA projection: a subset is good
exactly when the projected space it induces separates GOOD from BAD.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .classify import SvmConfig, decision_values, train_svm, stratified_folds
from .ingest import AllFeaturesDropped, standardize
from .model import FeatureSubset, InstanceTable, Outcome
from .project import fit_pca
from .seeds import derive_seed


class DegenerateLabels(Exception):
    pass


@dataclass(frozen=True)
class GaConfig:
    """Search parameters. ``mutation_rate`` of None means 1/n per bit."""

    population_size: int = 50
    generations: int = 100
    crossover_rate: float = 0.9
    mutation_rate: float | None = None
    tournament_size: int = 2
    min_k: int = 4
    max_k: int = 12
    cv_folds: int = 5
    seed: int = 0

    def __post_init__(self) -> None:
        if self.population_size < 1:
            raise ValueError("population_size must be positive")
        if self.generations < 0:
            raise ValueError("generations must be >= 0")
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise ValueError("crossover_rate must be a probability")
        if self.mutation_rate is not None and not 0.0 <= self.mutation_rate <= 1.0:
            raise ValueError("mutation_rate must be a probability")
        if self.tournament_size < 1 or self.tournament_size > self.population_size:
            raise ValueError("tournament_size must be in [1, population_size]")
        if self.min_k < 2:
            raise ValueError("min_k must be >= 2 (2D projection needs 2 features)")
        if self.max_k < self.min_k:
            raise ValueError("max_k must be >= min_k")
        if self.cv_folds < 2:
            raise ValueError("cv_folds must be >= 2")


@dataclass(frozen=True)
class FitnessValue:
    mean_cv_accuracy: float
    subset_size: int


@dataclass(frozen=True)
class SelectionResult:
    best: FeatureSubset
    best_fitness: FitnessValue
    history: tuple[FitnessValue, ...]


# Classifier used inside the fitness function: linear kernel on the 2D
# projection, loose tolerance and few passes since only held-out accuracy
# matters for ranking subsets.
_FITNESS_SVM = SvmConfig(kernel="linear", C=1.0, gamma=1.0, tolerance=1e-2, max_passes=8)


def _order_key(names: tuple[str, ...], fitness: FitnessValue):
    """Total order used everywhere ties must break deterministically:
    higher accuracy, then smaller subset, then lexicographically smaller names.
    Minimal key = best candidate."""
    return (-fitness.mean_cv_accuracy, fitness.subset_size, names)


def tie_break(candidates: Sequence[tuple[FeatureSubset, FitnessValue]]) -> FeatureSubset:
    if not candidates:
        raise ValueError("no candidates")
    best = min(candidates, key=lambda c: _order_key(c[0].sorted_names, c[1]))
    return best[0]


def _sorted_by_id(table: InstanceTable) -> InstanceTable:
    rows = tuple(sorted(table.rows, key=lambda r: r.instance_id))
    return InstanceTable(table.feature_names, table.algorithm_names, rows)


def evaluate_subset(
    table: InstanceTable, subset: FeatureSubset, config: GaConfig, seed: int
) -> FitnessValue:
    """Mean k-fold CV accuracy over algorithms, on the subset's 2D projection.

    Rows are put in sorted-instance-id order before anything else, so the
    result is invariant to the table's row permutation. Algorithms whose
    labels cannot be stratified (single class, or a class with one member)
    are skipped; if every algorithm is skipped, DegenerateLabels is raised.
    Subsets whose columns collapse under standardization score 0.
    """
    size = len(subset)
    if not (config.min_k <= size <= min(config.max_k, len(table.feature_names))):
        raise ValueError(f"subset size {size} outside [{config.min_k}, {config.max_k}]")

    ordered = _sorted_by_id(table)
    try:
        matrix, scaling = standardize(ordered, subset)
    except AllFeaturesDropped:
        return FitnessValue(0.0, size)
    if matrix.shape[1] < 2:
        return FitnessValue(0.0, size)

    model = fit_pca(matrix, feature_names=scaling.feature_names, scaling=scaling)
    coords = matrix @ model.loadings

    accuracies = []
    for algorithm in ordered.algorithm_names:
        idx, y = ordered.labeled_indices(algorithm)
        n_pos = int(np.sum(y == 1.0))
        n_neg = int(np.sum(y == -1.0))
        if min(n_pos, n_neg) < 2:
            continue
        pts = coords[idx]
        k_eff = min(config.cv_folds, n_pos, n_neg)
        rng = np.random.default_rng(derive_seed(seed, f"folds:{algorithm}"))
        correct = 0
        total = 0
        for fold_no, test_idx in enumerate(stratified_folds(y, k_eff, rng)):
            if len(test_idx) == 0:
                continue
            train_mask = np.ones(len(y), dtype=bool)
            train_mask[test_idx] = False
            svm_config = replace(
                _FITNESS_SVM, seed=derive_seed(seed, f"svm:{algorithm}:{fold_no}")
            )
            svm = train_svm(pts[train_mask], y[train_mask], svm_config)
            values = decision_values(svm, pts[test_idx])
            predicted = np.where(values >= 0.0, 1.0, -1.0)
            correct += int(np.sum(predicted == y[test_idx]))
            total += len(test_idx)
        accuracies.append(correct / total)

    if not accuracies:
        raise DegenerateLabels("no algorithm has two stratifiable label classes")
    return FitnessValue(float(np.mean(accuracies)), size)


def run_ga(table: InstanceTable, config: GaConfig) -> SelectionResult:
    """Evolve bitmask-encoded subsets: tournament selection, uniform crossover,
    per-bit mutation, cardinality repair, 1-elitism. Fully seed-deterministic."""
    n = len(table.feature_names)
    max_k = min(config.max_k, n)
    if config.min_k > max_k:
        raise ValueError(f"min_k {config.min_k} exceeds available features {n}")
    mutation_rate = config.mutation_rate if config.mutation_rate is not None else 1.0 / n

    usable = False
    for algorithm in table.algorithm_names:
        _, y = table.labeled_indices(algorithm)
        if min(int(np.sum(y == 1.0)), int(np.sum(y == -1.0))) >= 2:
            usable = True
            break
    if not usable:
        raise DegenerateLabels("no algorithm has two stratifiable label classes")

    names = table.feature_names
    rng = np.random.default_rng(derive_seed(config.seed, "ga"))
    fitness_seed = derive_seed(config.seed, "fitness")
    ordered = _sorted_by_id(table)
    cache: dict[tuple[int, ...], FitnessValue] = {}

    def evaluate(mask: np.ndarray) -> FitnessValue:
        key = tuple(np.flatnonzero(mask))
        if key not in cache:
            subset = FeatureSubset.of(names[i] for i in key)
            cache[key] = evaluate_subset(ordered, subset, config, fitness_seed)
        return cache[key]

    def subset_names(mask: np.ndarray) -> tuple[str, ...]:
        return tuple(sorted(names[i] for i in np.flatnonzero(mask)))

    def repair(mask: np.ndarray) -> np.ndarray:
        count = int(mask.sum())
        while count < config.min_k:
            absent = np.flatnonzero(~mask)
            mask[rng.choice(absent)] = True
            count += 1
        while count > max_k:
            present = np.flatnonzero(mask)
            mask[rng.choice(present)] = False
            count -= 1
        return mask

    def random_individual() -> np.ndarray:
        k = int(rng.integers(config.min_k, max_k + 1))
        mask = np.zeros(n, dtype=bool)
        mask[rng.choice(n, size=k, replace=False)] = True
        return mask

    population = [random_individual() for _ in range(config.population_size)]
    fitnesses = [evaluate(m) for m in population]

    def best_index() -> int:
        return min(
            range(len(population)),
            key=lambda i: _order_key(subset_names(population[i]), fitnesses[i]),
        )

    def tournament() -> np.ndarray:
        picks = rng.integers(0, config.population_size, size=config.tournament_size)
        winner = min(
            picks, key=lambda i: _order_key(subset_names(population[i]), fitnesses[i])
        )
        return population[winner]

    elite_idx = best_index()
    best_mask = population[elite_idx].copy()
    best_fitness = fitnesses[elite_idx]
    history = [best_fitness]

    for _ in range(config.generations):
        children = [best_mask.copy()]  # 1-elitism
        while len(children) < config.population_size:
            parent_a = tournament()
            parent_b = tournament()
            if rng.random() < config.crossover_rate:
                take_a = rng.random(n) < 0.5
                child = np.where(take_a, parent_a, parent_b)
            else:
                child = parent_a.copy()
            flips = rng.random(n) < mutation_rate
            child = repair(child ^ flips)
            children.append(child)
        population = children
        fitnesses = [evaluate(m) for m in population]
        gen_best = best_index()
        gen_key = _order_key(subset_names(population[gen_best]), fitnesses[gen_best])
        if gen_key < _order_key(subset_names(best_mask), best_fitness):
            best_mask = population[gen_best].copy()
            best_fitness = fitnesses[gen_best]
        history.append(best_fitness)

    return SelectionResult(
        best=FeatureSubset.of(subset_names(best_mask)),
        best_fitness=best_fitness,
        history=tuple(history),
    )
