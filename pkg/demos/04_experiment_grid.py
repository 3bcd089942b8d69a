"""
The full experiment grid
========================

For every location and season: rank, fuse, select the top k, and compare
forest and ridge errors with and without selection. Run with
``python demos/04_experiment_grid.py``; the same grid is available as
``rankselect experiment --config demos/grid.toml --out-dir out``.
"""

# %%
from rankselect import SyntheticSpec, generate_synthetic
from rankselect.evaluation import ExperimentConfig, ForestParams, run_grid
from rankselect.reporting import pivot

seasons = ("DJF", "MAM", "JJA", "SON")
datasets = {
    loc: {s: generate_synthetic(SyntheticSpec(225, 36, 5, seed=10 * i + j).with_snr(2.0))
          for j, s in enumerate(seasons)}
    for i, loc in enumerate(("north", "south", "coast"))
}

# %%
# Twenty trees keep the demo quick; the library default is 100.
cfg = ExperimentConfig(k_values=(5, 10, 15, 20, 25), forest=ForestParams(n_trees=20), seed=0)
results = run_grid(datasets, cfg)
print(len(results), "cells")

# %%
# One record per (location, season, k) with six errors.
r = results[1]
print(r.location, r.season, "k =", r.k)
for variant, err in r.rmse.items():
    print(f"  {variant:>8}: {err:.4f}")

# %%
# A location x season table for one variant, like a results table in a report.
locs, cols, matrix = pivot(results, "rf_1", 10)
print("rf_1, k=10".ljust(10), *(c.rjust(8) for c in cols))
for loc, row in zip(locs, matrix):
    print(loc.ljust(10), *(f"{v:8.4f}" for v in row))

# %%
# Error against k for one cell: selection usually helps most at small k
# when only a handful of features carry signal.
for res in results:
    if (res.location, res.season) == ("north", "DJF"):
        print(res.k, {v: round(e, 3) for v, e in res.rmse.items() if v.startswith("rf")})
