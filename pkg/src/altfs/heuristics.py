"""Polynomial-time searches for alternatives under univariate qualities.

All three methods sort features by decreasing quality, breaking ties by the
lower feature index, and use the Dice dissimilarity.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from .altset import AlternativesSpec, is_valid_alternative, max_overlap, selection_from_indices
from .quality import quality_values


def _prepare(q, k: int, tau: float):
    q = quality_values(q)
    if (q < 0).any():
        raise ValueError("greedy heuristics require non-negative feature qualities")
    n = len(q)
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    if not 0.0 < tau <= 1.0:
        raise ValueError(f"tau must lie in (0, 1], got {tau}")
    order = sorted(range(n), key=lambda j: (-q[j], j))
    shared = max_overlap(k, k, tau, "dice")  # floor((1 - tau) * k)
    fresh = k - shared  # ceil(tau * k)
    return q, n, order, shared, fresh


def greedy_replacement(q, k: int, a: int, tau: float) -> list[np.ndarray]:
    """Sequential heuristic: keep the top features, swap in unused ones for the rest.

    Returns fewer than ``a + 1`` sets once unused features run out.
    """
    q, n, order, shared, fresh = _prepare(q, k, tau)
    common = order[:shared]
    position = shared
    result = []
    i = 0
    while i <= a and i * fresh <= n - k:
        result.append(selection_from_indices(common + order[position:position + fresh], n))
        position += fresh
        i += 1
    return result


def greedy_balancing(q, k: int, a: int, tau: float) -> list[np.ndarray]:
    """Simultaneous heuristic distributing the non-shared features LPT-style.

    Each feature, in decreasing quality, goes to the non-full set whose
    non-shared quality is currently lowest. Returns an empty list when ``n`` is
    too small for all ``a + 1`` sets.
    """
    q, n, order, shared, fresh = _prepare(q, k, tau)
    if fresh * a + k > n:
        return []
    members = [list(order[:shared]) for _ in range(a + 1)]
    load = [0.0] * (a + 1)
    for position in range(shared, fresh * a + k):
        target = -1
        lowest = np.inf
        for i in range(a + 1):
            if load[i] < lowest and len(members[i]) < k:
                lowest = load[i]
                target = i
        j = order[position]
        members[target].append(j)
        load[target] += q[j]
    return [selection_from_indices(m, n) for m in members]


def greedy_depth(q, k: int, a: int, tau: float, max_checks: Optional[int] = None,
                 return_checks: bool = False):
    """Sequential heuristic walking size-k position arrays in lexicographic order.

    Unlike :func:`greedy_replacement` it may replace every feature, so it can
    find more alternatives at exponential worst-case cost. ``max_checks``
    limits the number of candidate validity checks.
    """
    q, n, order, shared, fresh = _prepare(q, k, tau)
    spec = AlternativesSpec(k=k, a=a, tau=tau, measure="dice")
    positions = list(range(k))
    found = []
    checks = 0
    has_next = True
    while len(found) <= a and has_next:
        if max_checks is not None and checks >= max_checks:
            break
        candidate = selection_from_indices([order[p] for p in positions], n)
        checks += 1
        if is_valid_alternative(candidate, found, spec):
            found.append(candidate)
        p = k - 1
        while p >= 0:
            position = positions[p]
            if position < n - k + p:
                for delta in range(k - p):
                    positions[p + delta] = position + delta + 1
                break
            p -= 1
        if p < 0:
            has_next = False
    if return_checks:
        return found, checks
    return found
