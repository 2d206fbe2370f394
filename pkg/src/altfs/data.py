"""Dataset ingestion and stratified cross-validation splits."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np


class DataError(ValueError):
    """Raised for malformed or unsupported input data."""


@dataclass(frozen=True)
class Dataset:
    features: np.ndarray
    feature_names: tuple
    target: np.ndarray
    name: str = "dataset"
    # raw labels mapped to 0 and 1
    labels: tuple = ("0", "1")

    def __post_init__(self):
        X = np.array(self.features, dtype=float)
        y = np.asarray(self.target)
        names = tuple(str(f) for f in self.feature_names)
        if X.ndim != 2:
            raise DataError("features must be a 2-d matrix")
        m, n = X.shape
        if m < 2 or n < 1:
            raise DataError(f"need at least 2 rows and 1 feature, got {m}x{n}")
        if not np.isfinite(X).all():
            raise DataError("feature values must be finite")
        if len(names) != n:
            raise DataError(f"{len(names)} feature names for {n} columns")
        if len(set(names)) != n:
            raise DataError("feature names must be unique")
        if y.shape != (m,):
            raise DataError(f"target must have length {m}")
        if not np.isin(y, (0, 1)).all():
            raise DataError("target must only contain 0 and 1")
        y = y.astype(np.int64)
        if y.min() == y.max():
            raise DataError("target must contain both classes")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "target", y)
        object.__setattr__(self, "feature_names", names)

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def subset(self, rows) -> "Dataset":
        rows = np.asarray(rows)
        return Dataset(self.features[rows], self.feature_names, self.target[rows],
                       self.name, self.labels)


def load_csv(path, target: Optional[str] = None, name: Optional[str] = None) -> Dataset:
    """Read a headered CSV; the target defaults to the last column.

    The lexicographically smaller raw label maps to class 0.
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"file not found: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DataError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    if target is None:
        t = len(header) - 1
    elif target in header:
        t = header.index(target)
    else:
        raise DataError(f"{path}: target column {target!r} not in header")
    feature_cols = [c for c in range(len(header)) if c != t]
    if not feature_cols:
        raise DataError(f"{path}: no feature columns")

    values = []
    raw_labels = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise DataError(f"{path}: row {lineno} has {len(row)} cells, header has {len(header)}")
        label = row[t].strip()
        if label == "":
            raise DataError(f"{path}: missing target value at row {lineno}, column {header[t]!r}")
        raw_labels.append(label)
        parsed = []
        for c in feature_cols:
            cell = row[c].strip()
            if cell == "":
                raise DataError(f"{path}: missing value at row {lineno}, column {header[c]!r}")
            try:
                v = float(cell)
            except ValueError:
                raise DataError(f"{path}: non-numeric value {cell!r} at row {lineno}, column {header[c]!r}")
            if not math.isfinite(v):
                raise DataError(f"{path}: non-finite value {cell!r} at row {lineno}, column {header[c]!r}")
            parsed.append(v)
        values.append(parsed)

    labels = sorted(set(raw_labels))
    if len(labels) != 2:
        raise DataError(f"{path}: non-binary target {header[t]!r} with {len(labels)} distinct label(s)")
    y = np.array([labels.index(v) for v in raw_labels])
    return Dataset(np.array(values, dtype=float).reshape(len(values), len(feature_cols)),
                   tuple(header[c] for c in feature_cols), y,
                   name or path.stem, tuple(labels))


def write_csv(ds: Dataset, path, target_name: str = "target"):
    """Write features with full float precision plus the raw target labels."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(ds.feature_names) + [target_name])
        for row, label in zip(ds.features, ds.target):
            writer.writerow([repr(float(v)) for v in row] + [ds.labels[label]])


@dataclass(frozen=True)
class SplitPlan:
    folds: tuple
    seed: int


def stratified_kfold(ds: Dataset, folds: int = 5, seed: int = 0) -> SplitPlan:
    """Shuffle each class with a seeded generator and deal its members round-robin.

    The dealing position carries over from one class to the next, which keeps
    test-fold sizes within one of each other. A class with fewer members than
    folds is allowed: some test folds then lack it, but every training part
    keeps it as long as the class has at least two members.
    """
    if folds < 2:
        raise DataError("need at least 2 folds")
    y = ds.target
    if folds > len(y):
        raise DataError(f"{folds} folds for only {len(y)} rows")
    counts = np.bincount(y, minlength=2)
    if counts.min() < 2:
        raise DataError(f"smallest class has {counts.min()} member, too few for {folds} folds "
                        "(a training part would lose the class)")
    rng = np.random.default_rng(seed)
    assignment = np.empty(len(y), dtype=np.int64)
    offset = 0
    for cls in (0, 1):
        members = rng.permutation(np.flatnonzero(y == cls))
        assignment[members] = (offset + np.arange(len(members))) % folds
        offset = (offset + len(members)) % folds
    everything = np.arange(len(y))
    plan = []
    for f in range(folds):
        test = everything[assignment == f]
        train = everything[assignment != f]
        plan.append((train, test))
    return SplitPlan(tuple(plan), seed)


def stratified_holdout(y: Sequence[int], test_fraction: float, seed: int = 0):
    """Stratified two-way split; returns (train_indices, test_indices)."""
    if not 0.0 < test_fraction < 1.0:
        raise DataError("test_fraction must lie strictly between 0 and 1")
    y = np.asarray(y)
    rng = np.random.default_rng(seed)
    train, test = [], []
    for cls in (0, 1):
        members = rng.permutation(np.flatnonzero(y == cls))
        n_test = int(round(test_fraction * len(members)))
        test.extend(members[:n_test])
        train.extend(members[n_test:])
    return np.sort(np.array(train, dtype=np.int64)), np.sort(np.array(test, dtype=np.int64))
