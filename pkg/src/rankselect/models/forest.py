"""Random forest regression: bootstrap-resampled, feature-subsampled trees."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ..exceptions import TooFewRows
from .tree import RegressionTree, _resolve_max_features

logger = logging.getLogger(__name__)


def _fit_one(X, y, seed_seq, bootstrap, min_samples_leaf, max_features):
    rng = np.random.default_rng(seed_seq)
    n = X.shape[0]
    if bootstrap:
        rows = rng.integers(0, n, size=n)
        Xb, yb = X[rows], y[rows]
    else:
        Xb, yb = X, y
    tree = RegressionTree(min_samples_leaf=min_samples_leaf,
                          max_features=max_features, random_state=rng)
    return tree.fit(Xb, yb)


class RandomForest:
    """Average of regression trees, each grown on a bootstrap resample.

    Parameters
    ----------
    n_trees : int
    max_features : int, float, "third" or None
        Features drawn (without replacement) as split candidates at each
        node. ``"third"`` means ``max(1, n_features // 3)``; None means all.
    min_samples_leaf : int
    bootstrap : bool
        Disable only for tests; every tree then sees the full data.
    seed : int
        Root seed. Tree ``i`` draws from the ``i``-th child of
        ``SeedSequence(seed)``, so results do not depend on ``n_jobs``.
    n_jobs : int
        Worker threads used to grow trees.
    """

    def __init__(self, n_trees=100, max_features="third", min_samples_leaf=1,
                 bootstrap=True, seed=0, n_jobs=1):
        self.n_trees = n_trees
        self.max_features = max_features
        self.min_samples_leaf = min_samples_leaf
        self.bootstrap = bootstrap
        self.seed = seed
        self.n_jobs = n_jobs

    def fit(self, X, y, feature_names=None):
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        if self.n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        if X.shape[0] < 2 * self.min_samples_leaf:
            raise TooFewRows(
                f"need at least {2 * self.min_samples_leaf} rows, got {X.shape[0]}")
        children = np.random.SeedSequence(self.seed).spawn(self.n_trees)
        args = (self.bootstrap, self.min_samples_leaf, self.max_features)
        if self.n_jobs and self.n_jobs > 1:
            with ThreadPoolExecutor(max_workers=self.n_jobs) as pool:
                trees = list(pool.map(lambda s: _fit_one(X, y, s, *args), children))
        else:
            trees = [_fit_one(X, y, s, *args) for s in children]
        self.trees_ = trees
        self.n_features_in_ = X.shape[1]
        self.max_features_ = _resolve_max_features(self.max_features, X.shape[1])
        self.feature_names_in_ = tuple(feature_names) if feature_names is not None else None
        return self

    def predict(self, X) -> np.ndarray:
        return np.mean([t.predict(X) for t in self.trees_], axis=0)

    @property
    def feature_importances_(self) -> np.ndarray:
        """Mean impurity decrease per feature, normalised to sum to 1."""
        total = np.mean([t.impurity_decrease() for t in self.trees_], axis=0)
        s = total.sum()
        if s <= 0:
            logger.warning("forest has no splits; returning uniform importances")
            return np.full(self.n_features_in_, 1.0 / self.n_features_in_)
        return total / s
