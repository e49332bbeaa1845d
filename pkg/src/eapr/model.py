"""Shared domain types: instance tables, outcome labels, and table validation."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

# Geometric stages (hulls, PCA) need at least this many rows.
MIN_GEOMETRY_ROWS = 3


class Outcome(enum.Enum):
    """Per-algorithm label: patched (GOOD), not patched (BAD), never attempted (MISSING)."""

    GOOD = "GOOD"
    BAD = "BAD"
    MISSING = "MISSING"


@dataclass(frozen=True)
class Violation:
    """One broken table invariant. ``row`` is an instance id, ``column`` a field name;
    either may be None for table-level rules."""

    row: str | None
    column: str | None
    rule: str

    def __str__(self) -> str:
        loc = ", ".join(p for p in (self.row, self.column) if p)
        return f"{self.rule} ({loc})" if loc else self.rule


@dataclass(frozen=True)
class InstanceRecord:
    """One instance: a feature vector plus one outcome label per algorithm.

    ``features`` is ordered like the owning table's ``feature_names``.
    """

    instance_id: str
    dataset_tag: str
    features: tuple[float, ...]
    outcomes: Mapping[str, Outcome]


@dataclass(frozen=True)
class FeatureSubset:
    """A non-empty set of feature names chosen out of a table's candidates."""

    selected: frozenset[str]

    def __post_init__(self) -> None:
        if not self.selected:
            raise ValueError("feature subset must be non-empty")

    @classmethod
    def of(cls, names: Iterable[str]) -> "FeatureSubset":
        return cls(frozenset(names))

    @property
    def sorted_names(self) -> tuple[str, ...]:
        return tuple(sorted(self.selected))

    def __len__(self) -> int:
        return len(self.selected)


# Per-instance (z1, z2) pairs as an (n, 2) float array, row-aligned with the table.
Coordinates2D = np.ndarray


@dataclass(frozen=True)
class InstanceTable:
    """Instances crossed with features and per-algorithm outcomes."""

    feature_names: tuple[str, ...]
    algorithm_names: tuple[str, ...]
    rows: tuple[InstanceRecord, ...]

    @classmethod
    def build(
        cls,
        feature_names: Sequence[str],
        algorithm_names: Sequence[str],
        rows: Iterable[InstanceRecord],
    ) -> "InstanceTable":
        return cls(tuple(feature_names), tuple(algorithm_names), tuple(rows))

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def instance_ids(self) -> tuple[str, ...]:
        return tuple(r.instance_id for r in self.rows)

    @property
    def dataset_tags(self) -> tuple[str, ...]:
        return tuple(r.dataset_tag for r in self.rows)

    def feature_index(self, name: str) -> int:
        try:
            return self.feature_names.index(name)
        except ValueError:
            raise KeyError(f"unknown feature: {name}") from None

    def ordered_subset(self, subset: FeatureSubset) -> tuple[str, ...]:
        """Subset names in this table's column order."""
        missing = subset.selected - set(self.feature_names)
        if missing:
            raise KeyError(f"features not in table: {sorted(missing)}")
        return tuple(n for n in self.feature_names if n in subset.selected)

    def feature_matrix(self, names: Sequence[str] | None = None) -> np.ndarray:
        """Dense (n_rows, n_features) matrix, columns in ``names`` order."""
        if names is None:
            names = self.feature_names
        idx = [self.feature_index(n) for n in names]
        data = np.array([r.features for r in self.rows], dtype=float)
        if data.size == 0:
            return data.reshape(len(self.rows), len(self.feature_names))[:, idx]
        return data[:, idx]

    def outcome_labels(self, algorithm: str) -> tuple[Outcome, ...]:
        if algorithm not in self.algorithm_names:
            raise KeyError(f"unknown algorithm: {algorithm}")
        return tuple(r.outcomes[algorithm] for r in self.rows)

    def labeled_indices(self, algorithm: str) -> tuple[np.ndarray, np.ndarray]:
        """Row indices with a non-MISSING label for ``algorithm`` and their
        +/-1 encoding (GOOD=+1, BAD=-1)."""
        labels = self.outcome_labels(algorithm)
        idx = np.array([i for i, o in enumerate(labels) if o is not Outcome.MISSING], dtype=int)
        y = np.array(
            [1.0 if labels[i] is Outcome.GOOD else -1.0 for i in idx], dtype=float
        )
        return idx, y


def validate_table(table: InstanceTable) -> list[Violation]:
    """Check every table invariant; violations are returned, never raised.

    Empty result means the table is acceptable to every downstream stage's
    shape preconditions.
    """
    violations: list[Violation] = []

    seen_features: set[str] = set()
    for name in table.feature_names:
        if not name:
            violations.append(Violation(None, name, "empty feature name"))
        elif name in seen_features:
            violations.append(Violation(None, name, "duplicate feature name"))
        seen_features.add(name)

    if len(table.rows) < MIN_GEOMETRY_ROWS:
        violations.append(Violation(None, None, "too few rows"))
    if len(table.feature_names) < 2:
        violations.append(Violation(None, None, "too few features"))

    seen_ids: set[str] = set()
    n_features = len(table.feature_names)
    algo_set = set(table.algorithm_names)
    for record in table.rows:
        if record.instance_id in seen_ids:
            violations.append(Violation(record.instance_id, "instance_id", "duplicate id"))
        seen_ids.add(record.instance_id)

        if len(record.features) != n_features:
            violations.append(
                Violation(record.instance_id, None, "feature length mismatch")
            )
        else:
            for name, value in zip(table.feature_names, record.features):
                if not math.isfinite(value):
                    violations.append(
                        Violation(record.instance_id, name, "non-finite feature")
                    )

        if set(record.outcomes) != algo_set:
            violations.append(
                Violation(record.instance_id, None, "outcome columns mismatch")
            )

    return violations
