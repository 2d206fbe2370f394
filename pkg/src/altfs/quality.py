"""Feature-target qualities and feature-feature dependencies.

Mutual information uses a plug-in estimator on equal-width histograms. Columns
holding at most ``bins`` distinct integer values are used as-is instead of
being binned, so binary targets and small categorical codes stay exact.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

MEASURES = ("mutual_information", "abs_pearson")
NORMALIZATIONS = ("none", "sum_to_one", "min_max")


@dataclass(frozen=True)
class FeatureQualities:
    values: np.ndarray
    measure: str = "mutual_information"
    normalization: str = "none"
    feature_names: Optional[tuple] = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1:
            raise ValueError("feature qualities must be one-dimensional")
        if not np.isfinite(values).all():
            raise ValueError("feature qualities must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class DependencyMatrix:
    values: np.ndarray
    measure: str = "mutual_information"
    normalization: str = "none"

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ValueError("dependency matrix must be square")
        if not np.allclose(values, values.T, rtol=0, atol=1e-12):
            raise ValueError("dependency matrix must be symmetric")
        np.fill_diagonal(values, 0.0)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)


def quality_values(q) -> np.ndarray:
    """Plain float array from FeatureQualities or any sequence."""
    return np.asarray(getattr(q, "values", q), dtype=float)


def discretize(x, bins: int = 10) -> np.ndarray:
    """Map a column to integer codes: exact values for small integer columns, equal-width bins otherwise."""
    x = np.asarray(x, dtype=float)
    distinct = np.unique(x)
    if len(distinct) <= bins and np.all(distinct == np.round(distinct)):
        return np.searchsorted(distinct, x)
    lo, hi = x.min(), x.max()
    if hi == lo:
        return np.zeros(len(x), dtype=np.int64)
    codes = np.floor((x - lo) / (hi - lo) * bins).astype(np.int64)
    return np.minimum(codes, bins - 1)


def _mi_codes(a: np.ndarray, b: np.ndarray) -> float:
    m = len(a)
    joint = np.zeros((a.max() + 1, b.max() + 1))
    np.add.at(joint, (a, b), 1.0)
    joint /= m
    pa = joint.sum(axis=1, keepdims=True)
    pb = joint.sum(axis=0, keepdims=True)
    nz = joint > 0
    mi = float(np.sum(joint[nz] * np.log(joint[nz] / (pa @ pb)[nz])))
    return max(mi, 0.0)


def mutual_information(x, y, bins: int = 10) -> float:
    """Plug-in mutual information in nats."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) != len(y):
        raise ValueError("x and y must have the same length")
    if len(x) < 2:
        raise ValueError("mutual information needs at least two observations")
    if bins < 2:
        raise ValueError("bins must be at least 2")
    return _mi_codes(discretize(x, bins), discretize(y, bins))


def abs_pearson(x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) != len(y):
        raise ValueError("x and y must have the same length")
    if len(x) < 2:
        raise ValueError("correlation needs at least two observations")
    xc = x - x.mean()
    yc = y - y.mean()
    denom = math.sqrt(float(xc @ xc) * float(yc @ yc))
    if denom == 0.0:
        return 0.0
    return min(1.0, abs(float(xc @ yc)) / denom)


def dependency(x, y, measure: str = "mutual_information", bins: int = 10) -> float:
    if measure == "mutual_information":
        return mutual_information(x, y, bins)
    if measure == "abs_pearson":
        return abs_pearson(x, y)
    raise ValueError(f"unknown dependency measure {measure!r}")


def normalize(values, normalization: str) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if normalization == "none":
        return values.copy()
    if normalization == "sum_to_one":
        total = values.sum()
        return values / total if total != 0 else values.copy()
    if normalization == "min_max":
        lo, hi = values.min(), values.max()
        if hi == lo:
            return np.zeros_like(values)
        return (values - lo) / (hi - lo)
    raise ValueError(f"unknown normalization {normalization!r}")


def univariate_qualities(ds, measure="mutual_information", bins=10, normalization="sum_to_one"):
    X = ds.features
    raw = [dependency(X[:, j], ds.target, measure, bins) for j in range(X.shape[1])]
    return FeatureQualities(
        normalize(raw, normalization), measure, normalization, tuple(ds.feature_names)
    )


def _raw_pairwise(X, measure, bins) -> np.ndarray:
    n = X.shape[1]
    D = np.zeros((n, n))
    if measure == "mutual_information":
        codes = [discretize(X[:, j], bins) for j in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                D[i, j] = D[j, i] = _mi_codes(codes[i], codes[j])
    else:
        for i in range(n):
            for j in range(i + 1, n):
                D[i, j] = D[j, i] = dependency(X[:, i], X[:, j], measure, bins)
    return D


def pairwise_dependencies(ds, measure="mutual_information", bins=10, normalization="none"):
    """Symmetric feature-feature dependencies with a zero diagonal.

    ``min_max`` scales over the off-diagonal entries only; use
    :func:`mrmr_inputs` for the joint scaling with feature-target values.
    """
    D = _raw_pairwise(ds.features, measure, bins)
    n = D.shape[0]
    if normalization == "min_max" and n > 1:
        off = ~np.eye(n, dtype=bool)
        D[off] = normalize(D[off], "min_max")
    elif normalization not in ("none", "min_max"):
        raise ValueError(f"unsupported normalization {normalization!r} for dependencies")
    np.fill_diagonal(D, 0.0)
    return DependencyMatrix(D, measure, normalization)


def mrmr_inputs(ds, measure="mutual_information", bins=10):
    """Relevance and redundancy min-max-scaled jointly to [0, 1]."""
    q = np.array([dependency(ds.features[:, j], ds.target, measure, bins)
                  for j in range(ds.n_features)])
    D = _raw_pairwise(ds.features, measure, bins)
    n = len(q)
    off = ~np.eye(n, dtype=bool)
    pooled = np.concatenate([q, D[off]])
    lo, hi = pooled.min(), pooled.max()
    scale = hi - lo
    if scale > 0:
        q = (q - lo) / scale
        D = (D - lo) / scale
    else:
        q = np.zeros_like(q)
        D = np.zeros_like(D)
    np.fill_diagonal(D, 0.0)
    return (FeatureQualities(q, measure, "min_max", tuple(ds.feature_names)),
            DependencyMatrix(D, measure, "min_max"))


def fcbf_forbidden_pairs(target_dependency, feature_dependency) -> frozenset:
    """Feature pairs that must not be selected together.

    A pair is forbidden when the dependency between the two features is at
    least as strong as either feature's dependency on the target. Both inputs
    must be on the same scale.
    """
    q = quality_values(target_dependency)
    D = np.asarray(getattr(feature_dependency, "values", feature_dependency), dtype=float)
    n = len(q)
    pairs = set()
    for j1 in range(n):
        for j2 in range(j1 + 1, n):
            if q[j1] <= D[j2, j1] or q[j2] <= D[j1, j2]:
                pairs.add((j1, j2))
    return frozenset(pairs)


def fcbf_inputs(ds, measure="mutual_information", bins=10):
    """Sum-to-one qualities plus forbidden pairs derived from raw dependencies."""
    raw = univariate_qualities(ds, measure, bins, "none")
    D = pairwise_dependencies(ds, measure, bins, "none")
    q = FeatureQualities(normalize(raw.values, "sum_to_one"), measure, "sum_to_one",
                         tuple(ds.feature_names))
    return q, fcbf_forbidden_pairs(raw, D)


def load_importance_scores(path, feature_names: Optional[Sequence[str]] = None) -> FeatureQualities:
    """Read a ``feature,score`` CSV, aligned to ``feature_names`` when given."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"importance file not found: {path}")
    scores: dict[str, float] = {}
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] != ["feature", "score"]:
            raise ValueError(f"{path}: expected header 'feature,score'")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise ValueError(f"{path}:{lineno}: expected two columns, got {len(row)}")
            name, raw = row[0].strip(), row[1].strip()
            try:
                value = float(raw)
            except ValueError:
                raise ValueError(f"{path}:{lineno}: score {raw!r} for feature {name!r} is not a number")
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"{path}:{lineno}: score for feature {name!r} must be finite and >= 0")
            if name in scores:
                raise ValueError(f"{path}:{lineno}: duplicate feature {name!r}")
            scores[name] = value
    if feature_names is None:
        names = list(scores)
    else:
        names = list(feature_names)
        missing = [f for f in names if f not in scores]
        if missing:
            raise ValueError(f"{path}: missing score for feature(s) {', '.join(missing)}")
        unknown = [f for f in scores if f not in set(names)]
        if unknown:
            raise ValueError(f"{path}: unknown feature(s) {', '.join(unknown)}")
    return FeatureQualities([scores[f] for f in names], "importance", "none", tuple(names))


def write_scores(path, feature_names, values):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["feature", "score"])
        for name, v in zip(feature_names, quality_values(values)):
            writer.writerow([name, repr(float(v))])
