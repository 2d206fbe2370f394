"""Exact search for alternative feature sets by depth-first branch-and-bound.

Features are branched on in descending quality. At each depth the engine
decides, for one feature, which of the variable feature sets contain it.
Sequential search is the special case of one variable set constrained
against fixed existing sets; simultaneous search has ``a + 1`` variable sets
and breaks their permutation symmetry by keeping them in decreasing
lexicographic order.

Overlaps and mRMR redundancy are evaluated directly instead of through the
auxiliary variables an integer-linear formulation would need.
"""

from __future__ import annotations

import enum
import math
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .altset import AlternativesSpec, as_selection, max_overlap, selection_from_indices
from .quality import quality_values

_TOL = 1e-9
_CHECK_EVERY = 1024


class Status(str, enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    FEASIBLE = "Feasible"
    NOT_SOLVED = "NotSolved"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Univariate:
    q: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "q", quality_values(self.q))


@dataclass(frozen=True)
class Fcbf:
    q: np.ndarray
    forbidden_pairs: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "q", quality_values(self.q))
        n = len(self.q)
        pairs = set()
        for j1, j2 in self.forbidden_pairs:
            if j1 == j2 or not (0 <= j1 < n and 0 <= j2 < n):
                raise ValueError(f"invalid forbidden pair ({j1}, {j2})")
            pairs.add((min(j1, j2), max(j1, j2)))
        object.__setattr__(self, "forbidden_pairs", frozenset(pairs))


@dataclass(frozen=True)
class Mrmr:
    q: np.ndarray
    D: np.ndarray
    k: int

    def __post_init__(self):
        q = quality_values(self.q)
        D = np.array(getattr(self.D, "values", self.D), dtype=float)
        if D.shape != (len(q), len(q)):
            raise ValueError("dependency matrix does not match the number of qualities")
        if (D < 0).any():
            raise ValueError("mRMR dependencies must be non-negative")
        np.fill_diagonal(D, 0.0)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "D", D)


Objective = Univariate | Fcbf | Mrmr


@dataclass(frozen=True)
class Solution:
    selections: tuple
    objective_values: tuple
    status: Status
    wall_time_ms: int = 0
    nodes_expanded: int = 0
    # sum or min over objective_values, depending on the aggregation searched for
    objective: Optional[float] = None
    solver_calls: int = 1

    @property
    def found(self) -> bool:
        return self.status in (Status.OPTIMAL, Status.FEASIBLE)


def evaluate_objective(s, obj: Objective) -> float:
    s = as_selection(s)
    if len(s) != len(obj.q):
        raise ValueError(f"selection has length {len(s)}, objective expects {len(obj.q)}")
    idx = np.flatnonzero(s)
    relevance = float(obj.q[idx].sum())
    if isinstance(obj, Univariate):
        return relevance
    if isinstance(obj, Fcbf):
        chosen = set(idx.tolist())
        for j1, j2 in obj.forbidden_pairs:
            if j1 in chosen and j2 in chosen:
                raise ValueError(f"selection violates the FCBF constraint on pair ({j1}, {j2})")
        return relevance
    if isinstance(obj, Mrmr):
        k = obj.k
        if len(idx) != k:
            raise ValueError(f"mRMR objective requires exactly k={k} selected features, got {len(idx)}")
        if k == 1:
            return relevance
        redundancy = float(obj.D[np.ix_(idx, idx)].sum())
        return relevance / k - redundancy / (k * (k - 1))
    raise TypeError(f"unsupported objective {type(obj).__name__}")


def preselect(q, a: int, k: int) -> np.ndarray:
    """Indices of the ``(a + 1) * k`` best features, ties broken by lower index."""
    if isinstance(q, (Fcbf, Mrmr)):
        raise ValueError("pre-selection is only valid for the univariate objective")
    if isinstance(q, Univariate):
        q = q.q
    q = quality_values(q)
    if (q < 0).any():
        raise ValueError("pre-selection requires non-negative qualities")
    keep = min(len(q), (a + 1) * k)
    order = sorted(range(len(q)), key=lambda j: (-q[j], j))
    return np.array(sorted(order[:keep]), dtype=np.int64)


class _Timeout(Exception):
    pass


class _Found(Exception):
    pass


def _popcount(x: int) -> int:
    return bin(x).count("1")


class SearchEngine:
    """Branch-and-bound over ``n_sets`` variable selection vectors.

    ``forced`` optionally fixes single decisions: an ``(n_sets, n)`` array with
    -1 for free, 0 for must-exclude, 1 for must-include. ``preferred`` is an
    optional ``(n_sets, n)`` 0/1 array whose values are branched on first, so
    a first-feasible search returns a family close to it.
    """

    def __init__(self, obj: Objective, spec: AlternativesSpec, n_sets: int,
                 existing: Sequence = (), forced=None, aggregation: str = "sum",
                 first_feasible: bool = False, use_preselection: bool = True,
                 symmetry_breaking: Optional[bool] = None, preferred=None):
        self.obj = obj
        self.spec = spec
        self.k = k = spec.k
        q = obj.q
        n = len(q)
        self.n = n
        spec.check_n(n)
        if isinstance(obj, Mrmr) and obj.k != k:
            raise ValueError(f"mRMR objective was built for k={obj.k}, spec asks for k={k}")
        self.A = A = n_sets
        self.aggregation = aggregation
        self.first_feasible = first_feasible
        self.budget = spec.budget
        self.existing = [as_selection(e) for e in existing]
        for e in self.existing:
            if len(e) != n:
                raise ValueError("existing selection has the wrong length")
        self.ex_budget = [max_overlap(k, int(e.sum()), spec.tau, spec.measure) for e in self.existing]

        if forced is None:
            forced_arr = None
        else:
            forced_arr = np.asarray(forced, dtype=np.int64).reshape(A, n)
        if symmetry_breaking is None:
            symmetry_breaking = forced_arr is None or (forced_arr == -1).all()
        self.symmetry = symmetry_breaking and A > 1

        order = sorted(range(n), key=lambda j: (-q[j], j))
        if (use_preselection and isinstance(obj, Univariate) and forced_arr is None
                and (q >= 0).all()):
            keep = set(preselect(q, len(self.existing) + A - 1, k).tolist())
            order = [j for j in order if j in keep]
        self.order = order
        self.N = len(order)
        self.q = [float(v) for v in q]
        self.D = obj.D.tolist() if isinstance(obj, Mrmr) else None

        self.adj = [set() for _ in range(n)]
        if isinstance(obj, Fcbf):
            for j1, j2 in obj.forbidden_pairs:
                self.adj[j1].add(j2)
                self.adj[j2].add(j1)
        self.ex_of = [[e for e, sel in enumerate(self.existing) if sel[j]] for j in range(n)]

        self.forced = [[-1] * n for _ in range(A)] if forced_arr is None else forced_arr.tolist()
        # forced-in features at order positions >= t, per set
        self.forced_in_suffix = []
        for i in range(A):
            suffix = [0] * (self.N + 1)
            for t in range(self.N - 1, -1, -1):
                suffix[t] = suffix[t + 1] + (self.forced[i][order[t]] == 1)
            self.forced_in_suffix.append(suffix)
        # forced-in features dropped from the order can never be satisfied
        self._dropped_forced = forced_arr is not None and any(
            self.forced[i][j] == 1 for i in range(A) for j in range(n) if j not in set(order))

        self.masks = sorted(range(1 << A), key=lambda m: (-_popcount(m), m))
        self.preferred_mask = None
        if preferred is not None:
            pref = np.asarray(preferred, dtype=np.int64).reshape(A, n)
            self.preferred_mask = [sum(int(pref[i, j]) << i for i in range(A)) for j in range(n)]
        self.mask_bits = {m: [i for i in range(A) if m >> i & 1] for m in self.masks}
        self.mask_pairs = {m: [(b[x], b[y]) for x in range(len(b)) for y in range(x + 1, len(b))]
                           for m, b in self.mask_bits.items()}
        self.reset()

    # --- state -----------------------------------------------------------

    def reset(self):
        A = self.A
        self.p = 0
        self.count = [0] * A
        self.rel = [0.0] * A
        self.red = [0.0] * A
        self.chosen = [[] for _ in range(A)]
        self.blocked = [[0] * self.n for _ in range(A)]
        self.ov_pair = [[0] * A for _ in range(A)]
        self.ex_left = [list(self.ex_budget) for _ in range(A)]
        self.tied = [True] * max(A - 1, 0)
        self.stack = []
        self.nodes = 0
        self.best_value = -math.inf
        self.best_sets = None

    def allowed_masks(self):
        """Masks for the feature at the current depth that keep all constraints."""
        if self.p >= self.N:
            return []
        j = self.order[self.p]
        remaining_after = self.N - self.p - 1
        can_in = []
        can_out = []
        for i in range(self.A):
            f = self.forced[i][j]
            ok_in = (f != 0 and self.count[i] < self.k and self.blocked[i][j] == 0
                     and all(self.ex_left[i][e] > 0 for e in self.ex_of[j]))
            need = self.k - self.count[i]
            ok_out = f != 1 and remaining_after >= need
            can_in.append(ok_in)
            can_out.append(ok_out)
        result = []
        for m in self.masks:
            bits = m
            good = True
            for i in range(self.A):
                if bits >> i & 1:
                    if not can_in[i]:
                        good = False
                        break
                elif not can_out[i]:
                    good = False
                    break
            if not good:
                continue
            if any(self.ov_pair[i1][i2] >= self.budget for i1, i2 in self.mask_pairs[m]):
                continue
            if self.symmetry and any(
                    self.tied[i] and (m >> (i + 1) & 1) and not (m >> i & 1)
                    for i in range(self.A - 1)):
                continue
            result.append(m)
        if self.preferred_mask is not None:
            target = self.preferred_mask[j]
            result.sort(key=lambda m: _popcount(m ^ target))
        return result

    def push(self, mask: int):
        j = self.order[self.p]
        bits = self.mask_bits[mask]
        deltas = []
        for i in bits:
            d = 0.0
            if self.D is not None:
                row = self.D[j]
                d = 2.0 * sum(row[c] for c in self.chosen[i])
            deltas.append(d)
            self.count[i] += 1
            self.rel[i] += self.q[j]
            self.red[i] += d
            self.chosen[i].append(j)
            blocked = self.blocked[i]
            for nb in self.adj[j]:
                blocked[nb] += 1
            for e in self.ex_of[j]:
                self.ex_left[i][e] -= 1
        for i1, i2 in self.mask_pairs[mask]:
            self.ov_pair[i1][i2] += 1
        old_tied = self.tied
        self.tied = [t and ((mask >> i & 1) == (mask >> (i + 1) & 1)) for i, t in enumerate(old_tied)]
        self.stack.append((mask, deltas, old_tied))
        self.p += 1

    def pop(self):
        mask, deltas, old_tied = self.stack.pop()
        self.p -= 1
        j = self.order[self.p]
        for i, d in zip(self.mask_bits[mask], deltas):
            self.count[i] -= 1
            self.rel[i] -= self.q[j]
            self.red[i] -= d
            self.chosen[i].pop()
            blocked = self.blocked[i]
            for nb in self.adj[j]:
                blocked[nb] -= 1
            for e in self.ex_of[j]:
                self.ex_left[i][e] += 1
        for i1, i2 in self.mask_pairs[mask]:
            self.ov_pair[i1][i2] -= 1
        self.tied = old_tied

    # --- values and bounds -------------------------------------------------

    def _set_value(self, rel: float, red: float) -> float:
        if self.D is None:
            return rel
        k = self.k
        if k == 1:
            return rel
        return rel / k - red / (k * (k - 1))

    def _aggregate(self, values):
        if self.aggregation == "min":
            return min(values)
        return sum(values)

    def is_complete(self) -> bool:
        return all(c == self.k for c in self.count) and all(
            s[self.p] == 0 for s in self.forced_in_suffix)

    def current_values(self):
        return [self._set_value(self.rel[i], self.red[i]) for i in range(self.A)]

    def _eligible(self, i: int, j: int) -> bool:
        return (self.forced[i][j] != 0 and self.blocked[i][j] == 0
                and all(self.ex_left[i][e] > 0 for e in self.ex_of[j]))

    def _scores(self, i: int) -> list:
        """Eligible remaining features of set ``i`` as (score, feature), best first.

        Scores are in relevance units. Under mRMR each feature is charged its
        redundancy with the features set ``i`` already holds; redundancy among
        features still to come is non-negative and left out, so the charge
        never overestimates a completion's loss.
        """
        eligible = [j for j in self.order[self.p:] if self._eligible(i, j)]
        if self.D is None or self.k == 1 or not self.chosen[i]:
            return [(self.q[j], j) for j in eligible]
        scale = 2.0 / (self.k - 1)
        chosen = self.chosen[i]
        scored = []
        for j in eligible:
            row = self.D[j]
            scored.append((self.q[j] - scale * sum(row[c] for c in chosen), j))
        scored.sort(key=lambda t: -t[0])
        return scored

    def _fill(self, i: int, scored=None) -> float:
        """Best score the remaining slots of set ``i`` could add, or -inf."""
        r = self.k - self.count[i]
        if r == 0:
            return 0.0
        if scored is None:
            scored = self._scores(i)
        if len(scored) < r:
            return -math.inf
        best = sum(v for v, _ in scored[:r])
        # each existing set caps how many of its members may still join
        for e, left in enumerate(self.ex_left[i]):
            if left >= r:
                continue
            taken = inside = 0
            total = 0.0
            member = self.existing[e]
            for v, j in scored:
                if member[j]:
                    if inside >= left:
                        continue
                    inside += 1
                taken += 1
                total += v
                if taken == r:
                    break
            if taken < r:
                return -math.inf
            best = min(best, total)
        return best

    def _copy_fill(self, scored_sets) -> float:
        """Score bound for all sets jointly under the pairwise overlap budgets.

        A feature placed in m sets consumes at least m - 1 units of the summed
        pairwise budget, so extra copies beyond the first are limited in total.
        Each copy is credited with the feature's best score over the sets that
        can still take it.
        """
        R = sum(self.k - c for c in self.count)
        if R == 0:
            return 0.0
        extras_left = sum(
            self.budget - self.ov_pair[i1][i2]
            for i1 in range(self.A) for i2 in range(i1 + 1, self.A))
        avail: dict = {}
        top: dict = {}
        for i, scored in enumerate(scored_sets):
            if self.count[i] >= self.k:
                continue
            for v, j in scored:
                avail[j] = avail.get(j, 0) + 1
                if j not in top or v > top[j]:
                    top[j] = v
        total = 0.0
        for j in sorted(top, key=lambda j: -top[j]):
            take = min(avail[j], 1 + extras_left, R)
            extras_left -= take - 1
            total += take * top[j]
            R -= take
            if R == 0:
                return total
        return -math.inf

    def upper_bound(self) -> float:
        """Admissible bound on the aggregated objective of any completion."""
        k = self.k
        per_set = []
        scored_sets = []
        for i in range(self.A):
            scored = self._scores(i)
            fill = self._fill(i, scored)
            if fill == -math.inf:
                return -math.inf
            scored_sets.append(scored)
            per_set.append(self._set_value(self.rel[i] + fill, self.red[i]))
        if self.A == 1:
            return per_set[0]
        copy = self._copy_fill(scored_sets)
        if copy == -math.inf:
            return -math.inf
        joint = self._set_value(sum(self.rel) + copy, sum(self.red))
        if self.aggregation == "min":
            return min(min(per_set), joint / self.A)
        return min(sum(per_set), joint)

    # --- search ------------------------------------------------------------

    def _dfs(self):
        self.nodes += 1
        if self.deadline is not None and self.nodes % _CHECK_EVERY == 0:
            if time.perf_counter() > self.deadline:
                raise _Timeout
        if all(c == self.k for c in self.count):
            if all(s[self.p] == 0 for s in self.forced_in_suffix):
                value = self._aggregate(self.current_values())
                if value > self.best_value + _TOL or self.best_sets is None:
                    self.best_value = value
                    self.best_sets = [list(c) for c in self.chosen]
                    if self.first_feasible:
                        raise _Found
            return
        if self.p >= self.N:
            return
        if any(self.forced_in_suffix[i][self.p] > self.k - self.count[i] for i in range(self.A)):
            return
        if not self.first_feasible:
            bound = self.upper_bound()
            if bound == -math.inf:
                return
            if self.best_sets is not None and bound <= self.best_value + _TOL:
                return
        for mask in self.allowed_masks():
            self.push(mask)
            try:
                self._dfs()
            finally:
                self.pop()

    def run(self, timeout_s: Optional[float] = None):
        """Search and return ``(sets, status)`` where sets are index lists."""
        self.reset()
        start = time.perf_counter()
        self.deadline = None if timeout_s is None else start + timeout_s
        if self._dropped_forced:
            return None, Status.INFEASIBLE
        timed_out = False
        try:
            self._dfs()
        except _Found:
            pass
        except _Timeout:
            timed_out = True
        while self.stack:
            self.pop()
        if timed_out:
            status = Status.FEASIBLE if self.best_sets is not None else Status.NOT_SOLVED
        else:
            status = Status.OPTIMAL if self.best_sets is not None else Status.INFEASIBLE
        return self.best_sets, status


def _timeout_s(spec: AlternativesSpec, n_sets: int) -> Optional[float]:
    if spec.timeout_ms is None:
        return None
    return spec.timeout_ms * n_sets / 1000.0


def _solution(engine: SearchEngine, sets, status, start, aggregation) -> Solution:
    wall = int(round((time.perf_counter() - start) * 1000))
    if sets is None:
        return Solution((), (), status, wall, engine.nodes, None)
    n = engine.n
    selections = tuple(selection_from_indices(sorted(c), n) for c in sets)
    values = tuple(evaluate_objective(s, engine.obj) for s in selections)
    agg = min(values) if aggregation == "min" else sum(values)
    return Solution(selections, values, status, wall, engine.nodes, agg)


def solve_sequential(obj: Objective, spec: AlternativesSpec, existing: Sequence = (),
                     forced=None, first_feasible: bool = False,
                     use_preselection: bool = True, preferred=None) -> Solution:
    """Find one optimal feature set that is an alternative to every existing set."""
    start = time.perf_counter()
    engine = SearchEngine(obj, spec, 1, existing, forced=forced, first_feasible=first_feasible,
                          use_preselection=use_preselection, preferred=preferred)
    sets, status = engine.run(_timeout_s(spec, 1))
    return _solution(engine, sets, status, start, "sum")


def solve_simultaneous(obj: Objective, spec: AlternativesSpec, forced=None,
                       first_feasible: bool = False, use_preselection: bool = True,
                       preferred=None) -> Solution:
    """Find ``a + 1`` pairwise alternative feature sets with the best aggregated quality."""
    start = time.perf_counter()
    n_sets = spec.a + 1
    engine = SearchEngine(obj, spec, n_sets, (), forced=forced, aggregation=spec.aggregation,
                          first_feasible=first_feasible, use_preselection=use_preselection,
                          preferred=preferred)
    sets, status = engine.run(_timeout_s(spec, n_sets))
    return _solution(engine, sets, status, start, spec.aggregation)


def run_sequential_chain(obj: Objective, spec: AlternativesSpec, **kwargs) -> list[Solution]:
    """Original feature set plus ``a`` sequential alternatives, one solve per set.

    Every step is attempted; a failed step leaves the constraint set unchanged
    for the next one.
    """
    found = []
    chain = []
    for _ in range(spec.a + 1):
        sol = solve_sequential(obj, spec, found, **kwargs)
        chain.append(sol)
        if sol.found:
            found.append(sol.selections[0])
    return chain
