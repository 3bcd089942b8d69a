"""Regression models used to validate feature selections.

The estimator classes take plain arrays; the functions below wrap them for
:class:`~rankselect.data_io.FeatureTable` inputs and remember the feature
names so that prediction can check (and reorder) columns by name.
"""

from __future__ import annotations

import numpy as np

from ..exceptions import FeatureMismatch
from .bayes import BayesianRidge
from .forest import RandomForest
from .serialize import dumps, loads, model_from_record, model_to_record
from .tree import RegressionTree

__all__ = [
    "BayesianRidge", "RandomForest", "RegressionTree",
    "fit_tree", "fit_forest", "fit_bayesian_ridge", "predict",
    "feature_importances", "dumps", "loads", "model_to_record", "model_from_record",
]


def fit_tree(table, min_samples_leaf=1, max_features_per_split=None, rng_state=None):
    return RegressionTree(min_samples_leaf=min_samples_leaf,
                          max_features=max_features_per_split,
                          random_state=rng_state).fit(table.X, table.y, table.feature_names)


def fit_forest(table, n_trees=100, max_features_per_split="third", min_samples_leaf=1,
               seed=0, bootstrap=True, n_jobs=1):
    return RandomForest(n_trees=n_trees, max_features=max_features_per_split,
                        min_samples_leaf=min_samples_leaf, bootstrap=bootstrap,
                        seed=seed, n_jobs=n_jobs).fit(table.X, table.y, table.feature_names)


def fit_bayesian_ridge(table, max_iter=300, tol=1e-3, **kwargs):
    return BayesianRidge(max_iter=max_iter, tol=tol, **kwargs).fit(
        table.X, table.y, table.feature_names)


def _design(model, rows):
    names = getattr(model, "feature_names_in_", None)
    if hasattr(rows, "feature_names"):
        if names is None:
            return rows.X
        missing = set(names).difference(rows.feature_names)
        if missing:
            raise FeatureMismatch(f"rows lack training features: {sorted(missing)}")
        idx = [rows.feature_names.index(f) for f in names]
        return rows.X[:, idx]
    X = np.asarray(rows, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if X.shape[1] != model.n_features_in_:
        raise FeatureMismatch(
            f"expected {model.n_features_in_} feature columns, got {X.shape[1]}")
    return X


def predict(model, rows) -> np.ndarray:
    """Point predictions of a fitted tree, forest or ridge model.

    ``rows`` is a FeatureTable (columns matched by name) or a 2-D array in
    training column order.
    """
    return model.predict(_design(model, rows))


def feature_importances(model: RandomForest) -> dict:
    names = model.feature_names_in_ or tuple(f"x{j}" for j in range(model.n_features_in_))
    return dict(zip(names, model.feature_importances_.tolist()))
