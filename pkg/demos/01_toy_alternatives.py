"""
Alternatives on a six-feature toy problem
=========================================

Six features with fixed integer qualities. We ask for feature sets of size
three that differ from each other in at least half of their features, and
compare exact search with the greedy heuristics.
"""

import numpy as np

from altfs import (AlternativesSpec, Univariate, greedy_balancing, greedy_replacement,
                   run_sequential_chain, selected_indices, solve_simultaneous)

q = np.array([9, 8, 7, 3, 2, 1], dtype=float)
obj = Univariate(q)


def show(label, sets):
    rows = [[int(q[j]) for j in selected_indices(s)] for s in sets]
    print(f"{label:<22}", rows, "total", int(sum(map(sum, rows))))


# with tau=0.5 two sets of size three may share one feature
spec = AlternativesSpec(k=3, a=2, tau=0.5)

# sequential search: each set is optimal given the ones before it
chain = run_sequential_chain(obj, spec)
show("sequential", [s.selections[0] for s in chain])

# simultaneous search trades quality of the first set for the later ones
show("simultaneous (sum)", solve_simultaneous(obj, spec).selections)

# min aggregation balances the sets instead
balanced = solve_simultaneous(obj, AlternativesSpec(k=3, a=1, tau=0.5, aggregation="min"))
show("simultaneous (min)", balanced.selections)

# Greedy Replacement keeps the best features and swaps in the next ones
show("greedy replacement", greedy_replacement(q, k=3, a=1, tau=0.5))

# Greedy Balancing spreads the swapped-in features like LPT scheduling
show("greedy balancing", greedy_balancing(q, k=4, a=1, tau=0.5))

# a stricter threshold runs out of features
strict = run_sequential_chain(obj, AlternativesSpec(k=3, a=2, tau=1.0))
print("tau=1 statuses:", [str(s.status) for s in strict])
