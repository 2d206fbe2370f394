"""Decision trees with information-gain splits, and the MCC metric."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .quality import FeatureQualities

_GAIN_TOL = 1e-12


def _entropy(counts) -> float:
    total = sum(counts)
    if total == 0:
        return 0.0
    h = 0.0
    for c in counts:
        if c:
            p = c / total
            h -= p * math.log2(p)
    return h


@dataclass
class Node:
    counts: tuple
    feature: Optional[int] = None
    threshold: Optional[float] = None
    gain: float = 0.0
    left: Optional["Node"] = None
    right: Optional["Node"] = None

    @property
    def is_leaf(self) -> bool:
        return self.feature is None

    @property
    def label(self) -> int:
        # ties go to class 0
        return int(self.counts[1] > self.counts[0])

    @property
    def n_rows(self) -> int:
        return self.counts[0] + self.counts[1]


@dataclass
class TreeModel:
    root: Node
    n_features: int
    max_depth: Optional[int] = None
    min_leaf: int = 1

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        out = np.empty(len(X), dtype=np.int64)
        for r, row in enumerate(X):
            node = self.root
            while not node.is_leaf:
                node = node.left if row[node.feature] <= node.threshold else node.right
            out[r] = node.label
        return out

    def nodes(self):
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            if not node.is_leaf:
                stack.extend((node.right, node.left))

    def n_splits(self) -> int:
        return sum(1 for node in self.nodes() if not node.is_leaf)

    def depth(self) -> int:
        def walk(node):
            return 0 if node.is_leaf else 1 + max(walk(node.left), walk(node.right))
        return walk(self.root)

    def to_json(self) -> str:
        """Flat node list for debugging; ``left``/``right`` are list indices."""
        flat = []

        def visit(node):
            idx = len(flat)
            flat.append(None)
            entry = {"counts": list(node.counts)}
            if not node.is_leaf:
                entry.update(feature=node.feature, threshold=node.threshold, gain=node.gain)
                entry["left"] = visit(node.left)
                entry["right"] = visit(node.right)
            flat[idx] = entry
            return idx

        visit(self.root)
        return json.dumps(flat)


def _best_split(X, y, min_leaf):
    """Highest information gain over all features and midpoint thresholds.

    Ties prefer the lower feature index, then the lower threshold. A zero-gain
    split is still returned when it is the best available one; XOR-like
    interactions are only reachable through such splits.
    """
    m = len(y)
    total1 = int(y.sum())
    parent = _entropy((m - total1, total1))
    best = (-math.inf, None, None)
    for f in range(X.shape[1]):
        order = np.argsort(X[:, f], kind="stable")
        xs = X[order, f]
        ys = y[order]
        ones_left = np.cumsum(ys)[:-1]
        n_left = np.arange(1, m)
        cut = xs[1:] != xs[:-1]
        cut &= (n_left >= min_leaf) & (m - n_left >= min_leaf)
        if not cut.any():
            continue
        nl = n_left[cut].astype(float)
        l1 = ones_left[cut].astype(float)
        nr = m - nl
        r1 = total1 - l1
        h_left = _entropy_vec(l1, nl)
        h_right = _entropy_vec(r1, nr)
        gains = parent - (nl * h_left + nr * h_right) / m
        idx = int(np.argmax(gains))
        gain = float(gains[idx])
        if gain > best[0] + _GAIN_TOL:
            pos = np.flatnonzero(cut)[idx]
            threshold = (xs[pos] + xs[pos + 1]) / 2.0
            best = (gain, f, float(threshold))
    return best


def _entropy_vec(ones, total):
    p1 = ones / total
    p0 = 1.0 - p1
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -(np.where(p1 > 0, p1 * np.log2(p1), 0.0) + np.where(p0 > 0, p0 * np.log2(p0), 0.0))
    return h


def _subtree_gain(node) -> float:
    if node.is_leaf:
        return 0.0
    return node.gain + _subtree_gain(node.left) + _subtree_gain(node.right)


def train_tree(X, y, max_depth: Optional[int] = None, min_leaf: int = 1) -> TreeModel:
    """Greedy top-down induction.

    Growth stops on pure nodes, at ``max_depth``, when ``min_leaf`` forbids
    every split, or when no threshold separates the rows. A split without
    information gain is kept only if some split below it has positive gain.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
        raise ValueError("need at least one row and one feature")
    if len(y) != X.shape[0]:
        raise ValueError("X and y have different numbers of rows")

    def grow(rows, depth):
        ys = y[rows]
        ones = int(ys.sum())
        node = Node((len(ys) - ones, ones))
        if ones == 0 or ones == len(ys):
            return node
        if max_depth is not None and depth >= max_depth:
            return node
        if len(ys) < 2 * min_leaf:
            return node
        gain, f, threshold = _best_split(X[rows], ys, min_leaf)
        if f is None:
            return node
        go_left = X[rows, f] <= threshold
        left = grow(rows[go_left], depth + 1)
        right = grow(rows[~go_left], depth + 1)
        gain = max(gain, 0.0)
        if gain <= _GAIN_TOL and _subtree_gain(left) + _subtree_gain(right) <= _GAIN_TOL:
            # a zero-gain split only pays off through deeper splits
            return node
        node.feature, node.threshold, node.gain = f, threshold, gain
        node.left, node.right = left, right
        return node

    root = grow(np.arange(len(y)), 0)
    return TreeModel(root, X.shape[1], max_depth, min_leaf)


def feature_importance(model: TreeModel, feature_names=None) -> FeatureQualities:
    """Row-weighted information gain per feature, normalized to sum to one."""
    total_rows = model.root.n_rows
    imp = np.zeros(model.n_features)
    for node in model.nodes():
        if not node.is_leaf:
            imp[node.feature] += node.n_rows / total_rows * node.gain
    if imp.sum() > 0:
        imp = imp / imp.sum()
    names = tuple(feature_names) if feature_names is not None else None
    return FeatureQualities(imp, "model_gain", "sum_to_one", names)


def mcc(predicted, actual) -> float:
    """Matthews correlation coefficient; 0 whenever a marginal is empty."""
    predicted = np.asarray(predicted, dtype=np.int64)
    actual = np.asarray(actual, dtype=np.int64)
    if predicted.shape != actual.shape:
        raise ValueError(f"length mismatch: {predicted.shape} vs {actual.shape}")
    if predicted.size < 1:
        raise ValueError("need at least one prediction")
    tp = float(np.sum((predicted == 1) & (actual == 1)))
    tn = float(np.sum((predicted == 0) & (actual == 0)))
    fp = float(np.sum((predicted == 1) & (actual == 0)))
    fn = float(np.sum((predicted == 0) & (actual == 1)))
    denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn)
    if denom == 0:
        return 0.0
    return (tp * tn - fp * fn) / math.sqrt(denom)
