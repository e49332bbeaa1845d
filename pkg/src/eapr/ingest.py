"""CSV ingestion, sub-program aggregation, and feature scaling.

Input format is a comma-separated UTF-8 table:

    instance_id,dataset,<feature columns...>,<outcome columns prefixed "aprt:">

Outcome cells are "1" (GOOD), "0" (BAD) or empty (MISSING). The dataset
column is optional. Empty feature cells parse as NaN and are surfaced later
by validate_table rather than rejected here.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import BinaryIO, Sequence

import numpy as np

from .model import FeatureSubset, InstanceRecord, InstanceTable, Outcome


class IngestError(Exception):
    """Base class for ingestion failures."""


class MalformedCsv(IngestError):
    pass


class UnparseableCell(IngestError):
    def __init__(self, row: int, column: str, value: str):
        super().__init__(f"row {row}, column {column!r}: cannot parse {value!r}")
        self.row = row
        self.column = column
        self.value = value


class EmptyTable(IngestError):
    pass


class InconsistentOutcomes(IngestError):
    pass


class AllFeaturesDropped(IngestError):
    pass


@dataclass(frozen=True)
class ColumnSchema:
    """Designates the id column, the optional dataset column, and the prefix
    marking per-algorithm outcome columns."""

    id_column: str = "instance_id"
    dataset_column: str = "dataset"
    outcome_prefix: str = "aprt:"


@dataclass(frozen=True)
class ScalingParams:
    """Per-feature standardization parameters (population std, divisor N).

    Zero-variance columns are excluded from ``feature_names`` and listed in
    ``dropped_features``.
    """

    feature_names: tuple[str, ...]
    means: tuple[float, ...]
    stds: tuple[float, ...]
    dropped_features: tuple[str, ...]


@dataclass(frozen=True)
class MinMaxParams:
    vmin: float
    vmax: float

    def __post_init__(self) -> None:
        if self.vmax < self.vmin:
            raise ValueError("max must be >= min")

    @classmethod
    def from_values(cls, values: Sequence[float]) -> "MinMaxParams":
        arr = np.asarray(values, dtype=float)
        if arr.size == 0:
            raise ValueError("empty value vector")
        return cls(float(arr.min()), float(arr.max()))


def parse_instance_table(
    source: BinaryIO | bytes, schema: ColumnSchema = ColumnSchema()
) -> InstanceTable:
    """Parse a CSV byte stream into an InstanceTable.

    Raises MalformedCsv on structural problems, UnparseableCell on bad cells
    and EmptyTable when no data rows are present.
    """
    if isinstance(source, bytes):
        source = io.BytesIO(source)
    text = io.TextIOWrapper(source, encoding="utf-8", newline="")
    reader = csv.reader(text)

    try:
        header = next(reader)
    except StopIteration:
        raise EmptyTable("no header row") from None
    header = [h.strip() for h in header]

    if schema.id_column not in header:
        raise MalformedCsv(f"missing id column {schema.id_column!r}")
    id_pos = header.index(schema.id_column)
    dataset_pos = header.index(schema.dataset_column) if schema.dataset_column in header else None

    algorithm_names: list[str] = []
    outcome_pos: list[int] = []
    feature_names: list[str] = []
    feature_pos: list[int] = []
    for pos, name in enumerate(header):
        if pos == id_pos or pos == dataset_pos:
            continue
        if name.startswith(schema.outcome_prefix):
            algorithm_names.append(name[len(schema.outcome_prefix):])
            outcome_pos.append(pos)
        else:
            feature_names.append(name)
            feature_pos.append(pos)

    rows: list[InstanceRecord] = []
    for line_no, cells in enumerate(reader, start=2):
        if not cells:
            continue
        if len(cells) != len(header):
            raise MalformedCsv(
                f"row {line_no}: expected {len(header)} cells, got {len(cells)}"
            )
        cells = [c.strip() for c in cells]
        features = []
        for pos, name in zip(feature_pos, feature_names):
            cell = cells[pos]
            if cell == "":
                features.append(float("nan"))
                continue
            try:
                features.append(float(cell))
            except ValueError:
                raise UnparseableCell(line_no, name, cell) from None
        outcomes = {}
        for pos, alg in zip(outcome_pos, algorithm_names):
            cell = cells[pos]
            if cell == "":
                outcomes[alg] = Outcome.MISSING
            elif cell == "1":
                outcomes[alg] = Outcome.GOOD
            elif cell == "0":
                outcomes[alg] = Outcome.BAD
            else:
                raise UnparseableCell(line_no, schema.outcome_prefix + alg, cell)
        rows.append(
            InstanceRecord(
                instance_id=cells[id_pos],
                dataset_tag=cells[dataset_pos] if dataset_pos is not None else "",
                features=tuple(features),
                outcomes=outcomes,
            )
        )

    if not rows:
        raise EmptyTable("no data rows")
    return InstanceTable.build(feature_names, algorithm_names, rows)


def aggregate_rows(table: InstanceTable, group_key: str = "instance_id") -> InstanceTable:
    """Collapse sub-program rows to one row per group.

    ``group_key`` is "instance_id" or "dataset". Feature values become the
    arithmetic mean over the group; outcome labels must be identical within a
    group and are carried through (InconsistentOutcomes otherwise).
    """
    if group_key == "instance_id":
        key = lambda r: r.instance_id
    elif group_key == "dataset":
        key = lambda r: r.dataset_tag
    else:
        raise KeyError(f"group key must be 'instance_id' or 'dataset', got {group_key!r}")

    groups: dict[str, list[InstanceRecord]] = {}
    for record in table.rows:
        groups.setdefault(key(record), []).append(record)

    out_rows = []
    for value, members in groups.items():
        first = members[0]
        for other in members[1:]:
            for alg in table.algorithm_names:
                if other.outcomes[alg] is not first.outcomes[alg]:
                    raise InconsistentOutcomes(
                        f"group {value!r}: algorithm {alg!r} has conflicting labels"
                    )
        means = np.array([m.features for m in members], dtype=float).mean(axis=0)
        out_rows.append(
            InstanceRecord(
                instance_id=value,
                dataset_tag=first.dataset_tag,
                features=tuple(float(v) for v in means),
                outcomes=dict(first.outcomes),
            )
        )
    return InstanceTable.build(table.feature_names, table.algorithm_names, out_rows)


# Relative threshold under which a column counts as zero-variance.
_ZERO_STD = 1e-12


def standardize(
    table: InstanceTable, subset: FeatureSubset
) -> tuple[np.ndarray, ScalingParams]:
    """Center and scale the subset's columns to mean 0, population std 1.

    Zero-variance columns are dropped and reported. Raises AllFeaturesDropped
    when nothing survives.
    """
    if len(table.rows) < 2:
        raise ValueError("standardize requires at least 2 rows")
    names = table.ordered_subset(subset)
    matrix = table.feature_matrix(names)
    means = matrix.mean(axis=0)
    stds = matrix.std(axis=0)  # population (divisor N)

    keep = stds > _ZERO_STD * np.maximum(1.0, np.abs(means))
    dropped = tuple(n for n, k in zip(names, keep) if not k)
    kept_names = tuple(n for n, k in zip(names, keep) if k)
    if not kept_names:
        raise AllFeaturesDropped(f"all {len(names)} columns have zero variance")

    standardized = (matrix[:, keep] - means[keep]) / stds[keep]
    params = ScalingParams(
        feature_names=kept_names,
        means=tuple(float(v) for v in means[keep]),
        stds=tuple(float(v) for v in stds[keep]),
        dropped_features=dropped,
    )
    return standardized, params


def apply_scaling(table: InstanceTable, scaling: ScalingParams) -> np.ndarray:
    """Standardize a table's rows with previously fitted parameters."""
    matrix = table.feature_matrix(scaling.feature_names)
    means = np.asarray(scaling.means)
    stds = np.asarray(scaling.stds)
    return (matrix - means) / stds


def minmax_normalize(values: Sequence[float]) -> np.ndarray:
    """Affine rescale to [0, 1]; a constant vector maps to all 0.5."""
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise ValueError("empty value vector")
    vmin = arr.min()
    vmax = arr.max()
    if vmax - vmin <= 0.0:
        return np.full(arr.shape, 0.5)
    return (arr - vmin) / (vmax - vmin)
