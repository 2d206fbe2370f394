"""Small synthetic binary-classification datasets for demos and tests."""

from __future__ import annotations

import numpy as np

from .data import Dataset


def _names(n):
    return tuple(f"f{j + 1}" for j in range(n))


def separable(m: int = 200, n: int = 5, seed: int = 0) -> Dataset:
    """Target is a threshold on f1; the other features are noise."""
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(m, n))
    y = (X[:, 0] > 0).astype(int)
    if y.min() == y.max():
        y[0] = 1 - y[0]
    return Dataset(X, _names(n), y, "separable")


def xor_interaction(m: int = 200, n: int = 4, seed: int = 0) -> Dataset:
    """Target is the XOR of the signs of f1 and f2."""
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(m, n))
    y = ((X[:, 0] > 0) ^ (X[:, 1] > 0)).astype(int)
    return Dataset(X, _names(n), y, "xor")


def redundant_pairs(m: int = 300, n_pairs: int = 3, n_noise: int = 2, noise: float = 0.1,
                    seed: int = 0) -> Dataset:
    """Informative features each accompanied by a noisy copy."""
    rng = np.random.default_rng(seed)
    base = rng.normal(size=(m, n_pairs))
    copies = base + noise * rng.normal(size=(m, n_pairs))
    weights = np.linspace(1.0, 0.5, n_pairs)
    y = (base @ weights + 0.5 * rng.normal(size=m) > 0).astype(int)
    X = np.column_stack([base, copies, rng.normal(size=(m, n_noise))])
    return Dataset(X, _names(X.shape[1]), y, "redundant_pairs")


def informative(m: int = 500, n: int = 20, n_informative: int = 5, seed: int = 0) -> Dataset:
    """A linear-threshold target driven by the first ``n_informative`` features.

    Informative weights decrease from 1 to 0.4 so feature qualities are
    graded; the remaining features are independent noise.
    """
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(m, n))
    weights = np.linspace(1.0, 0.4, n_informative)
    score = X[:, :n_informative] @ weights + 0.3 * rng.normal(size=m)
    y = (score > 0).astype(int)
    return Dataset(X, _names(n), y, "informative")


GENERATORS = {
    "separable": separable,
    "xor": xor_interaction,
    "redundant_pairs": redundant_pairs,
    "informative": informative,
}
