"""Per-algorithm binary SVMs over 2D coordinates, trained with simplified SMO.

Models are one-vs-rest per algorithm (GOOD = +1, BAD = -1); ranking their
decision values on a query point yields the recommended algorithm order.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping, Sequence

import numpy as np

from .model import Coordinates2D

# Minimum multiplier kept when extracting support vectors.
_SV_EPS = 1e-12
# Smallest multiplier change that counts as optimization progress.
_STEP_EPS = 1e-10


def _snap(alpha: float, c: float) -> float:
    """Round a multiplier onto its box bound when within rounding distance.

    A residue like 5e-17 instead of exact 0 would keep the violation check
    firing on a step too small to take, stalling convergence."""
    if alpha < _SV_EPS:
        return 0.0
    if alpha > c - _SV_EPS:
        return c
    return alpha


class SingleClassLabels(Exception):
    pass


class TooFewInstances(Exception):
    pass


@dataclass(frozen=True)
class SvmConfig:
    """Kernel and optimizer settings.

    ``gamma`` is a positive float or "median-heuristic", which resolves to
    1 / (2 * median(pairwise distances)^2) on the training coordinates.
    """

    kernel: str = "rbf"
    C: float = 1.0
    gamma: float | str = "median-heuristic"
    tolerance: float = 1e-3
    max_passes: int = 200
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kernel not in ("linear", "rbf"):
            raise ValueError(f"unknown kernel {self.kernel!r}")
        if self.C <= 0.0:
            raise ValueError("C must be positive")
        if self.tolerance <= 0.0:
            raise ValueError("tolerance must be positive")
        if self.max_passes < 1:
            raise ValueError("max_passes must be positive")
        if isinstance(self.gamma, str) and self.gamma != "median-heuristic":
            raise ValueError("gamma must be a float or 'median-heuristic'")


@dataclass(frozen=True)
class SvmModel:
    support_vectors: np.ndarray  # (k, 2)
    alphas: np.ndarray  # (k,)
    labels: np.ndarray  # (k,) of +/-1
    bias: float
    gamma: float  # resolved value actually used
    config: SvmConfig
    converged: bool


def median_heuristic_gamma(points: np.ndarray) -> float:
    """1 / (2 * median^2) of the pairwise Euclidean distances; 1.0 if degenerate."""
    x = np.asarray(points, dtype=float)
    n = x.shape[0]
    if n < 2:
        return 1.0
    diff = x[:, None, :] - x[None, :, :]
    dist = np.sqrt((diff * diff).sum(axis=2))
    upper = dist[np.triu_indices(n, k=1)]
    med = float(np.median(upper))
    if med <= 0.0:
        return 1.0
    return 1.0 / (2.0 * med * med)


def _kernel_matrix(kind: str, gamma: float, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if kind == "linear":
        return a @ b.T
    sq = ((a[:, None, :] - b[None, :, :]) ** 2).sum(axis=2)
    return np.exp(-gamma * sq)


def train_svm(
    coords: Coordinates2D, labels: Sequence[float], config: SvmConfig = SvmConfig()
) -> SvmModel:
    """Fit a soft-margin SVM by simplified SMO.

    The second multiplier is chosen by max |E1 - E2| with a seeded random
    fallback; training stops when a full pass finds no KKT violation beyond
    ``config.tolerance`` or after ``config.max_passes`` passes.
    """
    x = np.asarray(coords, dtype=float)
    y = np.asarray(labels, dtype=float)
    if x.ndim != 2 or x.shape[0] != y.shape[0]:
        raise ValueError("coords and labels must align")
    classes = set(np.unique(y))
    if classes != {-1.0, 1.0}:
        if classes <= {-1.0, 1.0}:
            raise SingleClassLabels("both classes required for training")
        raise ValueError("labels must be +1/-1")

    n = x.shape[0]
    gamma = (
        median_heuristic_gamma(x)
        if config.gamma == "median-heuristic"
        else float(config.gamma)
    )
    k = _kernel_matrix(config.kernel, gamma, x, x)
    c = config.C
    tol = config.tolerance
    rng = np.random.default_rng(config.seed)

    alphas = np.zeros(n)
    bias = 0.0
    errors = -y.copy()  # f(x) = 0 initially, so E = f - y = -y

    def take_step(i: int, j: int) -> bool:
        nonlocal bias, errors
        if i == j:
            return False
        ai, aj = alphas[i], alphas[j]
        yi, yj = y[i], y[j]
        if yi != yj:
            low = max(0.0, aj - ai)
            high = min(c, c + aj - ai)
        else:
            low = max(0.0, ai + aj - c)
            high = min(c, ai + aj)
        if high - low < _STEP_EPS:
            return False
        eta = k[i, i] + k[j, j] - 2.0 * k[i, j]
        if eta <= 0.0:
            return False
        aj_new = aj + yj * (errors[i] - errors[j]) / eta
        aj_new = min(max(aj_new, low), high)
        aj_new = _snap(aj_new, c)
        if abs(aj_new - aj) < _STEP_EPS:
            return False
        ai_new = _snap(ai + yi * yj * (aj - aj_new), c)

        b1 = bias - errors[i] - yi * (ai_new - ai) * k[i, i] - yj * (aj_new - aj) * k[i, j]
        b2 = bias - errors[j] - yi * (ai_new - ai) * k[i, j] - yj * (aj_new - aj) * k[j, j]
        if 0.0 < ai_new < c:
            b_new = b1
        elif 0.0 < aj_new < c:
            b_new = b2
        else:
            b_new = 0.5 * (b1 + b2)

        errors += (
            yi * (ai_new - ai) * k[i, :]
            + yj * (aj_new - aj) * k[j, :]
            + (b_new - bias)
        )
        alphas[i] = ai_new
        alphas[j] = aj_new
        bias = b_new
        return True

    converged = False
    for _ in range(config.max_passes):
        r = y * errors  # r_i = y_i f(x_i) - 1
        violating = np.flatnonzero(((r < -tol) & (alphas < c)) | ((r > tol) & (alphas > 0.0)))
        if violating.size == 0:
            converged = True
            break
        progressed = False
        for i in violating:
            i = int(i)
            r_i = y[i] * errors[i]  # re-check: earlier steps move the errors
            if not ((r_i < -tol and alphas[i] < c) or (r_i > tol and alphas[i] > 0.0)):
                continue
            gaps = np.abs(errors[i] - errors)
            gaps[i] = -1.0
            if take_step(i, int(np.argmax(gaps))):
                progressed = True
                continue
            for j in rng.permutation(n):
                if take_step(i, int(j)):
                    progressed = True
                    break
        if not progressed:
            # no pair can move: the state is a fixed point, more passes
            # would replay it verbatim
            break

    sv = alphas > _SV_EPS
    return SvmModel(
        support_vectors=x[sv].copy(),
        alphas=alphas[sv].copy(),
        labels=y[sv].copy(),
        bias=float(bias),
        gamma=gamma,
        config=config,
        converged=converged,
    )


def decision_values(model: SvmModel, coords: Coordinates2D) -> np.ndarray:
    """f(x) = sum_i alpha_i y_i K(x_i, x) + b for each query point."""
    q = np.atleast_2d(np.asarray(coords, dtype=float))
    if model.support_vectors.shape[0] == 0:
        return np.full(q.shape[0], model.bias)
    k = _kernel_matrix(model.config.kernel, model.gamma, q, model.support_vectors)
    return k @ (model.alphas * model.labels) + model.bias


def predict(model: SvmModel, point: Sequence[float]) -> tuple[int, float]:
    """Label and decision value for one point; sign(0) maps to +1."""
    value = float(decision_values(model, np.asarray(point, dtype=float).reshape(1, 2))[0])
    return (1 if value >= 0.0 else -1), value


@dataclass(frozen=True)
class ClassifierMetrics:
    """Pooled held-out metrics for one binary classifier. Precision and recall
    are None when undefined (no predicted / no actual positives)."""

    accuracy: float
    precision: float | None
    recall: float | None


@dataclass(frozen=True)
class SelectorMetrics:
    per_algorithm: Mapping[str, ClassifierMetrics]
    accuracy: float
    precision: float | None


def compute_metrics(y_true: Sequence[float], y_pred: Sequence[float]) -> ClassifierMetrics:
    t = np.asarray(y_true, dtype=float)
    p = np.asarray(y_pred, dtype=float)
    if t.shape != p.shape or t.size == 0:
        raise ValueError("label vectors must be non-empty and aligned")
    tp = int(np.sum((t == 1.0) & (p == 1.0)))
    fp = int(np.sum((t == -1.0) & (p == 1.0)))
    fn = int(np.sum((t == 1.0) & (p == -1.0)))
    accuracy = float(np.mean(t == p))
    precision = tp / (tp + fp) if (tp + fp) > 0 else None
    recall = tp / (tp + fn) if (tp + fn) > 0 else None
    return ClassifierMetrics(accuracy, precision, recall)


def stratified_folds(
    labels: Sequence[float], folds: int, rng: np.random.Generator
) -> list[np.ndarray]:
    """Deal each class's (shuffled) indices round-robin into ``folds`` test sets."""
    y = np.asarray(labels, dtype=float)
    assignments: list[list[int]] = [[] for _ in range(folds)]
    for cls in (1.0, -1.0):
        members = np.flatnonzero(y == cls)
        members = members[rng.permutation(len(members))]
        for pos, idx in enumerate(members):
            assignments[pos % folds].append(int(idx))
    return [np.array(sorted(a), dtype=int) for a in assignments]


def cross_validate(
    coords: Coordinates2D,
    labels: Sequence[float],
    folds: int,
    config: SvmConfig = SvmConfig(),
) -> ClassifierMetrics:
    """Stratified k-fold CV; metrics are pooled over the held-out folds."""
    if folds < 2:
        raise ValueError("folds must be >= 2")
    x = np.asarray(coords, dtype=float)
    y = np.asarray(labels, dtype=float)
    n_pos = int(np.sum(y == 1.0))
    n_neg = int(np.sum(y == -1.0))
    if n_pos == 0 or n_neg == 0:
        raise SingleClassLabels("both classes required")
    if min(n_pos, n_neg) < 2:
        raise TooFewInstances("need at least 2 instances of each class")
    k_eff = min(folds, n_pos, n_neg)

    rng = np.random.default_rng(config.seed)
    pooled_true: list[np.ndarray] = []
    pooled_pred: list[np.ndarray] = []
    for fold_no, test_idx in enumerate(stratified_folds(y, k_eff, rng)):
        if len(test_idx) == 0:
            continue
        train_mask = np.ones(len(y), dtype=bool)
        train_mask[test_idx] = False
        fold_config = replace(config, seed=config.seed + fold_no + 1)
        model = train_svm(x[train_mask], y[train_mask], fold_config)
        values = decision_values(model, x[test_idx])
        pooled_true.append(y[test_idx])
        pooled_pred.append(np.where(values >= 0.0, 1.0, -1.0))
    return compute_metrics(np.concatenate(pooled_true), np.concatenate(pooled_pred))


def aggregate_metrics(per_algorithm: Mapping[str, ClassifierMetrics]) -> SelectorMetrics:
    """Unweighted mean over algorithms; precision averages the defined ones."""
    if not per_algorithm:
        raise ValueError("no per-algorithm metrics")
    accs = [m.accuracy for m in per_algorithm.values()]
    precs = [m.precision for m in per_algorithm.values() if m.precision is not None]
    return SelectorMetrics(
        per_algorithm=dict(per_algorithm),
        accuracy=float(np.mean(accs)),
        precision=float(np.mean(precs)) if precs else None,
    )


def select_aprt(
    models: Mapping[str, SvmModel], point: Sequence[float]
) -> list[tuple[str, float]]:
    """Rank algorithms for a point by descending decision value, ties by name."""
    if not models:
        raise ValueError("at least one model required")
    scored = [
        (name, float(decision_values(models[name], np.asarray(point).reshape(1, 2))[0]))
        for name in models
    ]
    scored.sort(key=lambda item: (-item[1], item[0]))
    return scored


def model_to_dict(model: SvmModel) -> dict:
    return {
        "kernel": model.config.kernel,
        "C": model.config.C,
        "gamma": model.gamma,
        "tolerance": model.config.tolerance,
        "max_passes": model.config.max_passes,
        "seed": model.config.seed,
        "support_vectors": [[float(a), float(b)] for a, b in model.support_vectors],
        "alphas": [float(a) for a in model.alphas],
        "labels": [float(v) for v in model.labels],
        "bias": model.bias,
        "converged": model.converged,
    }


def model_from_dict(data: dict) -> SvmModel:
    config = SvmConfig(
        kernel=data["kernel"],
        C=float(data["C"]),
        gamma=float(data["gamma"]),
        tolerance=float(data["tolerance"]),
        max_passes=int(data["max_passes"]),
        seed=int(data["seed"]),
    )
    return SvmModel(
        support_vectors=np.array(data["support_vectors"], dtype=float).reshape(-1, 2),
        alphas=np.array(data["alphas"], dtype=float),
        labels=np.array(data["labels"], dtype=float),
        bias=float(data["bias"]),
        gamma=float(data["gamma"]),
        config=config,
        converged=bool(data["converged"]),
    )
