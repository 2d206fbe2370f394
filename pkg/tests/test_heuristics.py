from collections import Counter

import numpy as np
import pytest

from altfs.altset import AlternativesSpec, is_valid_family, selected_indices
from altfs.heuristics import greedy_balancing, greedy_depth, greedy_replacement
from instances import nonneg_heuristic_instance

Q6 = (9, 8, 7, 3, 2, 1)


def qualities(sets, q):
    return [sorted((q[j] for j in selected_indices(s)), reverse=True) for s in sets]


def totals(sets, q):
    return [sum(q[j] for j in selected_indices(s)) for s in sets]


class TestGreedyReplacement:
    def test_ten_features(self):
        q = np.arange(10, 0, -1)  # feature j is the (j+1)-th best
        sets = greedy_replacement(q, k=5, a=5, tau=0.4)
        assert [selected_indices(s) for s in sets] == [[0, 1, 2, 3, 4], [0, 1, 2, 5, 6], [0, 1, 2, 7, 8]]

    def test_three_sets_example(self):
        sets = greedy_replacement(Q6, k=2, a=2, tau=0.5)
        assert totals(sets, Q6) == [17, 16, 12]

    def test_tau_one_blocks(self):
        q = [5, 1, 4, 2, 6, 3]
        sets = greedy_replacement(q, k=2, a=2, tau=1.0)
        assert [selected_indices(s) for s in sets] == [[0, 4], [2, 5], [1, 3]]

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            greedy_replacement([1, -1, 2], 1, 1, 0.5)

    def test_invalid_k(self):
        with pytest.raises(ValueError):
            greedy_replacement([1, 2], 3, 1, 0.5)

    def test_ties_lower_index(self):
        sets = greedy_replacement([1, 1, 1, 1], k=1, a=0, tau=1.0)
        assert selected_indices(sets[0]) == [0]


class TestGreedyBalancing:
    def test_lpt_example(self):
        sets = greedy_balancing(Q6, k=4, a=1, tau=0.5)
        assert qualities(sets, Q6) == [[9, 8, 7, 1], [9, 8, 3, 2]]

    def test_guard(self):
        assert greedy_balancing(Q6, k=4, a=2, tau=0.5) == []

    def test_same_multiset_as_replacement(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            q, k, a, tau = nonneg_heuristic_instance(rng)
            rep = greedy_replacement(q, k, a, tau)
            bal = greedy_balancing(q, k, a, tau)
            assert len(rep) == len(bal) == a + 1
            count = lambda sets: Counter(j for s in sets for j in selected_indices(s))
            assert count(rep) == count(bal)

    def test_min_quality_dominates_replacement(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            q, k, a, tau = nonneg_heuristic_instance(rng)
            rep = totals(greedy_replacement(q, k, a, tau), q)
            bal = totals(greedy_balancing(q, k, a, tau), q)
            assert min(bal) >= min(rep) - 1e-9


class TestGreedyDepth:
    def test_walkthrough(self):
        sets = greedy_depth(Q6, k=4, a=2, tau=0.5)
        assert qualities(sets, Q6) == [[9, 8, 7, 3], [9, 8, 2, 1], [7, 3, 2, 1]]

    def test_walkthrough_a1(self):
        sets = greedy_depth(Q6, k=4, a=1, tau=0.5)
        assert qualities(sets, Q6) == [[9, 8, 7, 3], [9, 8, 2, 1]]

    def test_non_monotonic(self):
        q = (9, 8, 7, 1)
        assert totals(greedy_depth(q, k=2, a=3, tau=0.5), q) == [17, 16, 10, 15]

    def test_a0(self):
        assert selected_indices(greedy_depth([1, 5, 3], k=2, a=0, tau=0.5)[0]) == [1, 2]

    def test_check_budget(self):
        sets, checks = greedy_depth(Q6, k=4, a=2, tau=0.5, max_checks=3, return_checks=True)
        assert checks == 3 and len(sets) == 1

    def test_finds_more_than_replacement(self):
        assert len(greedy_depth(Q6, 4, 2, 0.5)) > len(greedy_replacement(Q6, 4, 2, 0.5))

    def test_starts_like_replacement(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            q, k, a, tau = nonneg_heuristic_instance(rng, max_n=9)
            rep = greedy_replacement(q, k, a, tau)
            dep = greedy_depth(q, k, a, tau)
            assert totals(dep[:2], q) == pytest.approx(totals(rep[:2], q))


class TestValidity:
    @pytest.mark.parametrize("fn", [greedy_replacement, greedy_balancing, greedy_depth])
    def test_families_valid(self, fn):
        rng = np.random.default_rng(3)
        for _ in range(150):
            q, k, a, tau = nonneg_heuristic_instance(rng, max_n=9)
            sets = fn(q, k, a, tau)
            assert all(int(s.sum()) == k for s in sets)
            assert is_valid_family(sets, AlternativesSpec(k=k, a=a, tau=tau))
