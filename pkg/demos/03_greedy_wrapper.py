"""
Wrapper search with a prediction model in the loop
==================================================

Features come in redundant pairs, so a good alternative can swap each
feature for its twin. The Greedy Wrapper scores candidate sets by training
a decision tree and measuring MCC on a holdout split.
"""

from altfs import AlternativesSpec, HoldoutMCCOracle, selected_indices, wrapper_chain
from altfs.synthetic import redundant_pairs

ds = redundant_pairs(m=300, n_pairs=3, n_noise=2, noise=0.1, seed=0)
print("features:", ds.feature_names)

oracle = HoldoutMCCOracle(ds, 0.2, seed=0)
spec = AlternativesSpec(k=3, a=2, tau=1.0)

# eight features hold only two disjoint sets of three, so the third attempt is infeasible
for i, sol in enumerate(wrapper_chain(oracle, spec, max_iters=60)):
    if not sol.found:
        print(f"alternative {i}: {sol.status}")
        continue
    names = [ds.feature_names[j] for j in selected_indices(sol.selections[0])]
    print(f"alternative {i}: holdout MCC {sol.objective:.3f}  solver calls {sol.solver_calls}  {names}")

print("oracle evaluations:", oracle.calls)
