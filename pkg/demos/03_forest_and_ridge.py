"""
Random forest and Bayesian ridge on a planted signal
====================================================

Fit both models, compare held-out error, and read the forest's impurity
importances. Run with ``python demos/03_forest_and_ridge.py``.
"""

# %%
import numpy as np

from rankselect import SyntheticSpec, generate_synthetic
from rankselect.evaluation import rmse, train_test_indices
from rankselect.models import feature_importances, fit_bayesian_ridge, fit_forest, predict

table = generate_synthetic(SyntheticSpec(225, 36, 5, seed=5).with_snr(2.0))
train, test = train_test_indices(table.n_rows, 0.2, rng=0)
tr, te = table.take(train), table.take(test)
print(f"{tr.n_rows} training rows, {te.n_rows} test rows")

# %%
# A forest of 100 trees, each grown on a bootstrap resample and choosing
# among a random third of the features at every split.
forest = fit_forest(tr, n_trees=100, seed=1)
print("forest RMSE:", round(rmse(te.y, predict(forest, te)), 4))

# %%
# Bayesian ridge learns its own noise and weight precisions.
ridge = fit_bayesian_ridge(tr)
print("ridge RMSE: ", round(rmse(te.y, predict(ridge, te)), 4))
print(f"alpha={ridge.alpha_:.3f} lambda={ridge.lambda_:.3f} after {ridge.n_iter_} iterations")

# %%
# Importances sum to one; the planted features should dominate.
imp = feature_importances(forest)
top = sorted(imp, key=imp.get, reverse=True)[:8]
for name in top:
    mark = "*" if name in table.informative_features else " "
    print(f"{mark} {name}: {imp[name]:.3f}")

# %%
# The forest prediction is the plain mean of its trees.
manual = np.mean([t.predict(te.X) for t in forest.trees_], axis=0)
print("max |forest - mean of trees|:", float(np.max(np.abs(manual - forest.predict(te.X)))))

# %%
# Models serialise to versioned JSON for inspection; ridge becomes a
# weight table, trees become nested records.
import json

from rankselect.models import dumps, loads

text = dumps(ridge, indent=2)
record = json.loads(text)
for row in sorted(record["weights"], key=lambda r: -abs(r["weight"]))[:5]:
    print(f"{row['feature']}: {row['weight']:+.3f}")
assert np.array_equal(loads(text).predict(te.X), ridge.predict(te.X))
