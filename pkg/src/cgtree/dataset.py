"""Weighted classification datasets: CSV loading, validation and splitting."""

from __future__ import annotations

import csv
import math
import random
from dataclasses import dataclass

import numpy as np


class DataError(ValueError):
    """Raised for malformed input files or invalid dataset operations."""


@dataclass(frozen=True)
class Row:
    id: int
    features: np.ndarray
    target: int
    weight: int


class Dataset:
    """Immutable weighted dataset with class labels encoded as 0..T-1."""

    def __init__(self, features, targets, weights=None, class_names=None):
        self.features = np.asarray(features, dtype=float)
        if self.features.ndim != 2:
            raise DataError("feature matrix must be two-dimensional")
        self.targets = np.asarray(targets, dtype=np.int64)
        n = self.features.shape[0]
        if self.targets.shape != (n,):
            raise DataError("one target per row required")
        if weights is None:
            weights = np.ones(n, dtype=np.int64)
        self.weights = np.asarray(weights, dtype=np.int64)
        if self.weights.shape != (n,):
            raise DataError("one weight per row required")
        if n and self.weights.min() < 1:
            raise DataError("row weights must be >= 1")
        if n and self.targets.min() < 0:
            raise DataError("targets must be class indices >= 0")
        if class_names is None:
            count = int(self.targets.max()) + 1 if n else 0
            class_names = [str(t) for t in range(count)]
        self.class_names = list(class_names)
        if n and int(self.targets.max()) >= len(self.class_names):
            raise DataError("target index outside the class map")
        for arr in (self.features, self.targets, self.weights):
            arr.setflags(write=False)
        self._rows = None

    @property
    def num_rows(self) -> int:
        return self.features.shape[0]

    @property
    def num_features(self) -> int:
        return self.features.shape[1]

    @property
    def num_classes(self) -> int:
        return len(self.class_names)

    @property
    def total_weight(self) -> int:
        return int(self.weights.sum())

    @property
    def rows(self) -> list[Row]:
        if self._rows is None:
            self._rows = [
                Row(i, self.features[i], int(self.targets[i]), int(self.weights[i]))
                for i in range(self.num_rows)
            ]
        return self._rows

    def row(self, i: int) -> Row:
        return self.rows[i]

    def subset(self, indices) -> "Dataset":
        """New dataset from a row selection; rows are renumbered 0..n-1."""
        idx = list(indices)
        return Dataset(
            self.features[idx],
            self.targets[idx],
            self.weights[idx],
            self.class_names,
        )

    def classes_present(self) -> set[int]:
        return set(int(t) for t in np.unique(self.targets))


def _parse_cell(text: str):
    try:
        return float(text)
    except ValueError:
        return None


def _resolve_target_column(target_column, header, width):
    if target_column is None:
        return width - 1
    if isinstance(target_column, int):
        col = target_column if target_column >= 0 else width + target_column
        if not 0 <= col < width:
            raise DataError(f"target column index {target_column} out of range")
        return col
    if header is None:
        raise DataError(f"target column {target_column!r} needs a header row")
    try:
        return header.index(target_column)
    except ValueError:
        raise DataError(f"no column named {target_column!r} in header") from None


def load_csv(path, target_column=None) -> Dataset:
    """Load a numeric-feature CSV; the target column may hold arbitrary labels.

    The first line is treated as a header iff any of its non-target cells does
    not parse as a number.  Class labels are mapped to indices in order of
    first appearance; all row weights are 1.
    """
    try:
        fh = open(path, newline="", encoding="utf-8")
    except FileNotFoundError:
        raise DataError(f"no such file: {path}") from None
    with fh:
        records = [row for row in csv.reader(fh) if row]
    if not records:
        raise DataError(f"{path}: file holds no rows")

    width = len(records[0])
    if width < 2:
        raise DataError(f"{path}: need at least one feature column and a target")

    # Header detection must ignore the target cell, which is allowed to be a
    # string even on data lines.
    probe_target = _resolve_target_column(
        target_column if not isinstance(target_column, str) else None, None, width
    )
    first_cells = [c for i, c in enumerate(records[0]) if i != probe_target]
    has_header = any(_parse_cell(c) is None for c in first_cells)
    header = [c.strip() for c in records[0]] if has_header else None
    target_idx = _resolve_target_column(target_column, header, width)
    data = records[1:] if has_header else records
    if not data:
        raise DataError(f"{path}: no data rows after the header")

    features = []
    labels = []
    class_map: dict[str, int] = {}
    class_names: list[str] = []
    for line_no, rec in enumerate(data, start=2 if has_header else 1):
        if len(rec) != width:
            raise DataError(f"{path}:{line_no}: expected {width} columns, got {len(rec)}")
        vec = []
        for col, cell in enumerate(rec):
            if col == target_idx:
                continue
            value = _parse_cell(cell)
            if value is None:
                raise DataError(
                    f"{path}:{line_no}: column {col} is not numeric: {cell!r}"
                )
            vec.append(value)
        label = rec[target_idx].strip()
        if not label:
            raise DataError(f"{path}:{line_no}: empty target cell")
        if label not in class_map:
            class_map[label] = len(class_names)
            class_names.append(label)
        features.append(vec)
        labels.append(class_map[label])
    return Dataset(np.array(features), np.array(labels), class_names=class_names)


def split_train_test(dataset: Dataset, train_frac: float, test_frac: float, seed: int):
    """Disjoint (train, test) datasets from a seeded uniform permutation.

    The first floor(train_frac * n) permuted rows form the training set and the
    next floor(test_frac * n) the test set; any remainder is left unused.
    """
    if train_frac <= 0 or test_frac <= 0:
        raise DataError("both split fractions must be positive")
    if train_frac + test_frac > 1 + 1e-12:
        raise DataError("train_frac + test_frac must not exceed 1")
    n = dataset.num_rows
    order = list(range(n))
    random.Random(seed).shuffle(order)
    n_train = math.floor(train_frac * n)
    n_test = math.floor(test_frac * n)
    return dataset.subset(order[:n_train]), dataset.subset(order[n_train : n_train + n_test])
