"""Greedy Wrapper: solver-assisted hill climbing for black-box feature-set quality."""

from __future__ import annotations

import subprocess
import time
from typing import Optional, Sequence

import numpy as np

from .altset import AlternativesSpec, as_selection, is_valid_family, is_valid_alternative
from .data import DataError, stratified_holdout
from .predict import mcc, train_tree
from .quality import quality_values
from .solver import Solution, Status, Univariate, solve_sequential, solve_simultaneous


class QualityOracle:
    """Scores a family of selection vectors; higher is better.

    Subclasses implement :meth:`score_family`, returning the family score and,
    when available, the per-set breakdown. ``calls`` counts evaluations.
    """

    n_features: int

    def __init__(self):
        self.calls = 0
        self.last_set_scores: Optional[list] = None

    def score_family(self, family) -> tuple[float, Optional[list]]:
        raise NotImplementedError

    def __call__(self, family) -> float:
        self.calls += 1
        total, per_set = self.score_family([as_selection(s) for s in family])
        self.last_set_scores = per_set
        return total


class UnivariateOracle(QualityOracle):
    """Summed univariate qualities, mostly useful for testing the search."""

    def __init__(self, q):
        super().__init__()
        self.q = quality_values(q)
        self.n_features = len(self.q)

    def score_family(self, family):
        per_set = [float(self.q[s.astype(bool)].sum()) for s in family]
        return sum(per_set), per_set


class HoldoutMCCOracle(QualityOracle):
    """Validation MCC of decision trees trained on a stratified holdout split.

    A family scores the sum of its sets' MCCs.
    """

    def __init__(self, ds, split_fraction: float = 0.2, seed: int = 0,
                 max_depth: Optional[int] = None):
        super().__init__()
        train, valid = stratified_holdout(ds.target, split_fraction, seed)
        for part, name in ((train, "training"), (valid, "validation")):
            if len(part) == 0 or len(np.unique(ds.target[part])) < 2:
                raise DataError(f"degenerate holdout split: {name} part lacks a class")
        self.X_train, self.y_train = ds.features[train], ds.target[train]
        self.X_valid, self.y_valid = ds.features[valid], ds.target[valid]
        self.n_features = ds.n_features
        self.max_depth = max_depth

    def set_score(self, s) -> float:
        cols = np.flatnonzero(as_selection(s))
        if len(cols) == 0:
            return 0.0
        model = train_tree(self.X_train[:, cols], self.y_train, self.max_depth)
        return mcc(model.predict(self.X_valid[:, cols]), self.y_valid)

    def score_family(self, family):
        per_set = [self.set_score(s) for s in family]
        return sum(per_set), per_set


def holdout_mcc_oracle(ds, split_fraction: float = 0.2, seed: int = 0) -> HoldoutMCCOracle:
    return HoldoutMCCOracle(ds, split_fraction, seed)


class ExternalCommandOracle(QualityOracle):
    """Delegates scoring to a command.

    The command receives one selection bitstring per line on stdin, one line
    per feature set, and must print a single real number.
    """

    def __init__(self, command: Sequence[str], n_features: int, timeout_s: float = 600.0):
        super().__init__()
        self.command = list(command)
        self.n_features = n_features
        self.timeout_s = timeout_s

    def score_family(self, family):
        payload = "".join("".join(str(int(b)) for b in s) + "\n" for s in family)
        proc = subprocess.run(self.command, input=payload, capture_output=True, text=True,
                              timeout=self.timeout_s, check=False)
        if proc.returncode != 0:
            raise RuntimeError(f"oracle command failed ({proc.returncode}): {proc.stderr.strip()}")
        try:
            return float(proc.stdout.strip().splitlines()[-1]), None
        except (ValueError, IndexError):
            raise RuntimeError(f"oracle command printed no number: {proc.stdout!r}")


def greedy_wrapper(oracle: QualityOracle, spec: AlternativesSpec, mode: str = "simultaneous",
                   existing: Sequence = (), max_iters: int = 1000, initial=None) -> Solution:
    """Hill climbing over feature-pair swaps, each swap repaired by the solver.

    ``mode`` is ``"sequential"`` (one new set, constrained against
    ``existing``) or ``"simultaneous"`` (all ``a + 1`` sets variable). A swap of
    features ``(j1, j2)`` flips both features in every variable set; the
    solver then looks for any valid family containing the flips, and the
    family is kept only if the oracle score strictly improves. The solver
    prefers each decision's current value, so a swap changes as little else
    as the constraints allow. ``max_iters``
    bounds the solver invocations, the initial one included. ``initial``
    replaces the initial solver call with a given valid family.
    """
    if max_iters < 1:
        raise ValueError("max_iters must be at least 1")
    if mode not in ("sequential", "simultaneous"):
        raise ValueError(f"unknown wrapper mode {mode!r}")
    start = time.perf_counter()
    n = oracle.n_features
    spec.check_n(n)
    n_sets = 1 if mode == "sequential" else spec.a + 1
    constant = Univariate(np.zeros(n))
    existing = [as_selection(e) for e in existing]
    nodes = 0

    def solve(forced, preferred=None):
        # branching on current values first keeps untouched decisions as they are
        nonlocal nodes
        if mode == "sequential":
            sol = solve_sequential(constant, spec, existing, forced=forced, first_feasible=True,
                                   use_preselection=False, preferred=preferred)
        else:
            sol = solve_simultaneous(constant, spec, forced=forced, first_feasible=True,
                                     use_preselection=False, preferred=preferred)
        nodes += sol.nodes_expanded
        return list(sol.selections) if sol.found else None

    if initial is None:
        current = solve(None)
    else:
        current = [as_selection(s) for s in initial]
        if (len(current) != n_sets or any(int(s.sum()) != spec.k for s in current)
                or not is_valid_family(current, spec)
                or any(not is_valid_alternative(s, existing, spec) for s in current)):
            raise ValueError("initial family violates the constraints")
    iters = 1
    if current is None:
        wall = int(round((time.perf_counter() - start) * 1000))
        return Solution((), (), Status.INFEASIBLE, wall, nodes, None, iters)

    best = oracle(current)
    best_sets = oracle.last_set_scores
    j1, j2 = 0, 1
    while iters < max_iters and j1 < n - 1:
        forced = np.full((n_sets, n), -1, dtype=np.int64)
        for i, s in enumerate(current):
            forced[i, j1] = 1 - s[j1]
            forced[i, j2] = 1 - s[j2]
        candidate = solve(forced, np.array(current))
        iters += 1
        if candidate is not None:
            score = oracle(candidate)
            if score > best:
                current, best, best_sets = candidate, score, oracle.last_set_scores
                j1, j2 = 0, 1
                continue
        if j2 < n - 1:
            j2 += 1
        else:
            j1 += 1
            j2 = j1 + 1

    if best_sets is None:
        best_sets = [float("nan")] * len(current)
    wall = int(round((time.perf_counter() - start) * 1000))
    return Solution(tuple(current), tuple(best_sets), Status.FEASIBLE, wall, nodes, best, iters)


def wrapper_chain(oracle: QualityOracle, spec: AlternativesSpec, max_iters: int = 1000) -> list[Solution]:
    """Sequential Greedy Wrapper: one hill climb per feature set."""
    found, chain = [], []
    for _ in range(spec.a + 1):
        sol = greedy_wrapper(oracle, spec, "sequential", found, max_iters)
        chain.append(sol)
        if sol.found:
            found.append(sol.selections[0])
    return chain
