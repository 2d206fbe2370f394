"""Brute-force reference solver, independent of the branch-and-bound code.

Enumerates every size-k feature set, scores it directly from the objective
definitions and checks dissimilarity through the set-overlap formulas.
"""

import itertools

import numpy as np


def subsets(n, k):
    combos = np.array(list(itertools.combinations(range(n), k)), dtype=np.int64)
    masks = np.zeros((len(combos), n), dtype=np.int64)
    np.put_along_axis(masks, combos, 1, axis=1)
    return combos, masks


def set_values(combos, kind, q, D=None, forbidden=()):
    """Objective value of each subset; -inf for FCBF-forbidden ones."""
    q = np.asarray(q, dtype=float)
    rel = q[combos].sum(axis=1)
    k = combos.shape[1]
    if kind == "univariate":
        return rel
    if kind == "fcbf":
        bad = np.zeros(len(combos), dtype=bool)
        for j1, j2 in forbidden:
            bad |= (combos == j1).any(axis=1) & (combos == j2).any(axis=1)
        return np.where(bad, -np.inf, rel)
    if kind == "mrmr":
        if k == 1:
            return rel
        D = np.asarray(D, dtype=float)
        red = np.zeros(len(combos))
        for a, b in itertools.permutations(range(k), 2):
            red += D[combos[:, a], combos[:, b]]
        return rel / k - red / (k * (k - 1))
    raise ValueError(kind)


def dissim_ok(masks_a, masks_b, tau, measure):
    """Pairwise validity matrix between two stacks of selections."""
    inter = masks_a @ masks_b.T
    sa = masks_a.sum(axis=1)[:, None]
    sb = masks_b.sum(axis=1)[None, :]
    if measure == "dice":
        d = 1.0 - 2.0 * inter / (sa + sb)
    else:
        d = 1.0 - inter / (sa + sb - inter)
    return d >= tau - 1e-9


def best_sequential(n, k, tau, measure, values, existing=()):
    """Best single set that is an alternative to every existing one; None if infeasible."""
    combos, masks = subsets(n, k)
    ok = np.isfinite(values)
    if len(existing):
        ok &= dissim_ok(masks, np.asarray(existing, dtype=np.int64), tau, measure).all(axis=1)
    if not ok.any():
        return None
    return float(values[ok].max())


def best_simultaneous(n, k, a, tau, measure, values, aggregation):
    """Best aggregated value over families of a+1 pairwise alternatives; None if infeasible."""
    combos, masks = subsets(n, k)
    finite = np.isfinite(values)
    combos, masks, values = combos[finite], masks[finite], values[finite]
    m = len(values)
    if m == 0:
        return None
    if a == 0:
        return float(values.max())
    C = dissim_ok(masks, masks, tau, measure)
    np.fill_diagonal(C, False)
    agg = np.add if aggregation == "sum" else np.minimum
    if a == 1:
        pair = agg(values[:, None], values[None, :])
        pair = np.where(C, pair, -np.inf)
        best = pair.max()
        return None if best == -np.inf else float(best)
    if a == 2:
        best = -np.inf
        for i in range(m):
            row = C[i]
            both = row[:, None] & row[None, :] & C
            if not both.any():
                continue
            pv = agg(agg(values[i], values[:, None]), values[None, :])
            best = max(best, float(np.where(both, pv, -np.inf).max()))
        return None if best == -np.inf else best
    raise ValueError("enumeration supports a <= 2")
