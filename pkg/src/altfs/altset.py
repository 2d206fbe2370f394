"""Selection vectors, set dissimilarities and overlap budgets for alternatives."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

MEASURES = ("dice", "jaccard")
AGGREGATIONS = ("sum", "min")

_EPS = 1e-9


def as_selection(s) -> np.ndarray:
    """Coerce a 0/1 sequence into an int8 selection vector."""
    arr = np.asarray(s)
    if arr.ndim != 1:
        raise ValueError("selection vector must be one-dimensional")
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise ValueError("selection vector must only contain 0 and 1")
    return arr.astype(np.int8)


def selection_from_indices(indices, n: int) -> np.ndarray:
    s = np.zeros(n, dtype=np.int8)
    s[list(indices)] = 1
    return s


def selected_indices(s) -> list[int]:
    return [int(j) for j in np.flatnonzero(as_selection(s))]


def cardinality(s) -> int:
    return int(as_selection(s).sum())


def overlap(s1, s2) -> int:
    """Number of features selected in both vectors."""
    return int(np.dot(as_selection(s1).astype(np.int64), as_selection(s2).astype(np.int64)))


def dice(s1, s2) -> float:
    size1, size2 = cardinality(s1), cardinality(s2)
    if size1 + size2 == 0:
        raise ValueError("Dice dissimilarity is undefined for two empty sets")
    return 1.0 - 2.0 * overlap(s1, s2) / (size1 + size2)


def jaccard(s1, s2) -> float:
    size1, size2 = cardinality(s1), cardinality(s2)
    if size1 + size2 == 0:
        raise ValueError("Jaccard distance is undefined for two empty sets")
    common = overlap(s1, s2)
    return 1.0 - common / (size1 + size2 - common)


def dissimilarity(s1, s2, measure: str = "dice") -> float:
    if measure == "dice":
        return dice(s1, s2)
    if measure == "jaccard":
        return jaccard(s1, s2)
    raise ValueError(f"unknown dissimilarity measure {measure!r}")


def max_overlap(size1: int, size2: int, tau: float, measure: str = "dice") -> int:
    """Largest overlap two sets of the given sizes may share and stay tau-dissimilar."""
    if size1 < 0 or size2 < 0:
        raise ValueError("set sizes must be non-negative")
    if measure == "dice":
        factor = (1.0 - tau) / 2.0
    elif measure == "jaccard":
        factor = (1.0 - tau) / (2.0 - tau)
    else:
        raise ValueError(f"unknown dissimilarity measure {measure!r}")
    budget = math.floor(factor * (size1 + size2) + _EPS)
    # an overlap can never exceed the smaller set
    return max(0, min(budget, size1, size2))


@dataclass(frozen=True)
class AlternativesSpec:
    """User parameters of a search for alternatives.

    ``timeout_ms`` is granted per sought feature set, so a simultaneous search
    for ``a + 1`` sets gets ``(a + 1) * timeout_ms`` in total.
    """

    k: int
    a: int = 1
    tau: float = 0.5
    measure: str = "dice"
    aggregation: str = "sum"
    timeout_ms: Optional[int] = 60_000

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k}")
        if int(self.a) != self.a or self.a < 0:
            raise ValueError(f"a must be a non-negative integer, got {self.a}")
        if not 0.0 < self.tau <= 1.0:
            raise ValueError(f"tau must lie in (0, 1], got {self.tau}")
        if self.measure not in MEASURES:
            raise ValueError(f"measure must be one of {MEASURES}, got {self.measure!r}")
        if self.aggregation not in AGGREGATIONS:
            raise ValueError(f"aggregation must be one of {AGGREGATIONS}, got {self.aggregation!r}")
        if self.timeout_ms is not None and self.timeout_ms < 0:
            raise ValueError("timeout_ms must be non-negative")

    @property
    def budget(self) -> int:
        """Overlap allowed between two size-k sets."""
        return max_overlap(self.k, self.k, self.tau, self.measure)

    def check_n(self, n: int):
        if self.k > n:
            raise ValueError(f"k={self.k} exceeds the number of features n={n}")


def is_valid_alternative(candidate, existing: Sequence, spec: AlternativesSpec) -> bool:
    candidate = as_selection(candidate)
    if candidate.sum() == 0:
        raise ValueError("candidate feature set must not be empty")
    return all(
        dissimilarity(candidate, other, spec.measure) >= spec.tau - _EPS for other in existing
    )


def is_valid_family(family: Sequence, spec: AlternativesSpec) -> bool:
    """Pairwise validity of simultaneous alternatives."""
    family = list(family)
    return all(
        is_valid_alternative(family[i], family[:i], spec) for i in range(1, len(family))
    )
