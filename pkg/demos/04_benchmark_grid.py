"""
A small experimental grid
=========================

The harness runs every search method over cross-validation folds and
records one row per feature set. Here we look at how the dissimilarity
threshold tau affects the normalized training objective and how often the
search runs out of feasible alternatives.
"""

import numpy as np

from altfs.harness import normalized_train_objectives, run_grid
from altfs.synthetic import informative

ds = informative(m=500, n=20, n_informative=5, seed=0)
taus = [0.2, 0.4, 0.6, 0.8, 1.0]
records = run_grid([ds], ["mi"], ["seq", "sim_sum", "rep"], ks=[5], as_=[5], taus=taus,
                   folds=3, seed=0, timeout_ms=2000, workers=1)
print(len(records), "records")

norm = normalized_train_objectives(records, "max", fill_infeasible=0.0)
print("\nmean normalized train objective")
print("tau    " + "  ".join(f"{m:>8}" for m in ("seq", "sim_sum", "rep")))
for tau in taus:
    cells = []
    for method in ("seq", "sim_sum", "rep"):
        vals = [v for (run, _), v in norm.items() if run[2] == method and run[6] == tau]
        cells.append(f"{np.mean(vals):8.2f}")
    print(f"{tau:<6} " + "  ".join(cells))

print("\nshare of records without a feature set")
for tau in taus:
    rows = [r for r in records if r.tau == tau]
    missing = sum(r.train_objective is None for r in rows) / len(rows)
    print(f"tau={tau}: {missing:.2f}")
