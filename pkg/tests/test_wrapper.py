import itertools
import sys

import numpy as np
import pytest

from altfs.altset import AlternativesSpec, is_valid_alternative, is_valid_family, selection_from_indices
from altfs.data import DataError, Dataset
from altfs.solver import Status
from altfs.synthetic import separable
from altfs.wrapper import (ExternalCommandOracle, HoldoutMCCOracle, QualityOracle, UnivariateOracle,
                           greedy_wrapper, holdout_mcc_oracle, wrapper_chain)
from instances import random_qualities


class CountingSolverCalls(QualityOracle):
    """Univariate oracle that also records every family it sees."""

    def __init__(self, q):
        super().__init__()
        self.q = np.asarray(q, dtype=float)
        self.n_features = len(q)
        self.seen = []

    def score_family(self, family):
        self.seen.append([s.copy() for s in family])
        per_set = [float(self.q[s.astype(bool)].sum()) for s in family]
        return sum(per_set), per_set


class TestGreedyWrapper:
    def test_every_start_reaches_top_pair(self):
        q = [0.9, 0.1, 0.5, 0.7, 0.3, 0.2]
        spec = AlternativesSpec(k=2, a=0)
        for start in itertools.combinations(range(6), 2):
            sol = greedy_wrapper(UnivariateOracle(q), spec, "sequential",
                                 initial=[selection_from_indices(start, 6)])
            assert sorted(np.flatnonzero(sol.selections[0]).tolist()) == [0, 3]
            assert sol.objective == pytest.approx(1.6)

    def test_infeasible_no_oracle_calls(self):
        oracle = UnivariateOracle([4, 3, 2, 1])
        sol = greedy_wrapper(oracle, AlternativesSpec(k=3, a=1, tau=1.0), "simultaneous")
        assert sol.status == Status.INFEASIBLE
        assert oracle.calls == 0 and sol.selections == ()

    def test_max_iters_one_keeps_initial(self):
        q = [0.1, 0.2, 0.9, 0.8]
        start = [selection_from_indices([0, 1], 4)]
        sol = greedy_wrapper(UnivariateOracle(q), AlternativesSpec(k=2, a=0), "sequential",
                             max_iters=1, initial=start)
        assert sol.selections[0].tolist() == start[0].tolist()
        assert sol.solver_calls == 1

    def test_max_iters_one_without_initial(self):
        oracle = UnivariateOracle([0.1, 0.2, 0.9, 0.8])
        sol = greedy_wrapper(oracle, AlternativesSpec(k=2, a=1), "simultaneous", max_iters=1)
        assert sol.solver_calls == 1 and oracle.calls == 1

    def test_rejects_bad_budget_and_mode(self):
        with pytest.raises(ValueError):
            greedy_wrapper(UnivariateOracle([1, 2]), AlternativesSpec(k=1, a=0), max_iters=0)
        with pytest.raises(ValueError):
            greedy_wrapper(UnivariateOracle([1, 2]), AlternativesSpec(k=1, a=0), mode="parallel")

    def test_rejects_invalid_initial(self):
        with pytest.raises(ValueError):
            greedy_wrapper(UnivariateOracle([1, 2, 3]), AlternativesSpec(k=2, a=1, tau=1.0),
                           "simultaneous", initial=[selection_from_indices([0, 1], 3)] * 2)

    @pytest.mark.parametrize("seed", range(25))
    def test_random_runs_valid_and_within_budget(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(3, 9))
        k = int(rng.integers(1, min(3, n) + 1))
        a = int(rng.integers(0, 3))
        tau = float(rng.choice([0.25, 0.5, 0.75, 1.0]))
        spec = AlternativesSpec(k=k, a=a, tau=tau)
        max_iters = int(rng.integers(1, 30))
        oracle = CountingSolverCalls(random_qualities(rng, n))
        sol = greedy_wrapper(oracle, spec, "simultaneous", max_iters=max_iters)
        assert sol.solver_calls <= max_iters
        assert oracle.calls <= sol.solver_calls
        for family in oracle.seen:
            assert all(int(s.sum()) == k for s in family)
            assert is_valid_family(family, spec)
        if sol.found:
            assert is_valid_family(sol.selections, spec)
            scores = [sum(oracle.q[s.astype(bool)].sum() for s in f) for f in oracle.seen]
            assert sol.objective == pytest.approx(max(scores))

    def test_sequential_respects_existing(self):
        q = [0.9, 0.8, 0.7, 0.6, 0.5]
        spec = AlternativesSpec(k=2, a=1, tau=1.0)
        existing = [selection_from_indices([0, 1], 5)]
        sol = greedy_wrapper(UnivariateOracle(q), spec, "sequential", existing=existing)
        assert is_valid_alternative(sol.selections[0], existing, spec)
        assert sorted(np.flatnonzero(sol.selections[0]).tolist()) == [2, 3]

    def test_chain(self):
        q = [0.9, 0.8, 0.7, 0.6, 0.5, 0.1]
        chain = wrapper_chain(UnivariateOracle(q), AlternativesSpec(k=2, a=2, tau=1.0), max_iters=200)
        assert [round(s.objective, 9) for s in chain] == [1.7, 1.3, 0.6]


class TestHoldoutOracle:
    def test_all_features_separable(self):
        ds = separable(m=300, seed=4)
        oracle = holdout_mcc_oracle(ds, 0.2, seed=0)
        assert oracle([np.ones(ds.n_features, dtype=int)]) == pytest.approx(1.0)

    def test_uninformative_selection(self):
        ds = separable(m=400, seed=5)
        oracle = HoldoutMCCOracle(ds, 0.2, seed=0)
        s = np.ones(ds.n_features, dtype=int)
        s[0] = 0
        assert abs(oracle([s])) < 0.25

    def test_family_scores_sum_and_counter(self):
        ds = separable(seed=6)
        oracle = HoldoutMCCOracle(ds)
        fam = [selection_from_indices([0], 5), selection_from_indices([1, 2], 5)]
        first = oracle(fam)
        second = oracle(fam)
        assert first == second and oracle.calls == 2
        assert first == pytest.approx(sum(oracle.last_set_scores))

    def test_degenerate_split(self):
        ds = Dataset(np.arange(6, dtype=float).reshape(-1, 1), ["f1"], [0, 0, 0, 0, 0, 1])
        with pytest.raises(DataError):
            HoldoutMCCOracle(ds, 0.2)


class TestExternalOracle:
    def test_counts_ones(self, tmp_path):
        script = tmp_path / "oracle.py"
        script.write_text("import sys\nprint(sum(line.count('1') for line in sys.stdin))\n")
        oracle = ExternalCommandOracle([sys.executable, str(script)], n_features=4)
        assert oracle([np.array([1, 0, 1, 1]), np.array([0, 0, 0, 1])]) == 4.0
        assert oracle.last_set_scores is None

    def test_failure_reported(self, tmp_path):
        script = tmp_path / "bad.py"
        script.write_text("import sys\nsys.exit(3)\n")
        oracle = ExternalCommandOracle([sys.executable, str(script)], n_features=2)
        with pytest.raises(RuntimeError):
            oracle([np.array([1, 0])])

    def test_drives_wrapper(self, tmp_path):
        script = tmp_path / "weights.py"
        script.write_text(
            "import sys\nw = [1, 5, 2, 4]\n"
            "print(sum(w[j] for line in sys.stdin for j, c in enumerate(line.strip()) if c == '1'))\n")
        oracle = ExternalCommandOracle([sys.executable, str(script)], n_features=4)
        sol = greedy_wrapper(oracle, AlternativesSpec(k=2, a=0), "sequential", max_iters=50)
        assert np.flatnonzero(sol.selections[0]).tolist() == [1, 3]
