import json

import numpy as np
import pytest

from oracles import ols
from rankselect.data_io import FeatureTable, SyntheticSpec, generate_synthetic
from rankselect.exceptions import FeatureMismatch, TooFewRows
from rankselect.models import (
    BayesianRidge,
    RandomForest,
    RegressionTree,
    dumps,
    feature_importances,
    fit_bayesian_ridge,
    fit_forest,
    fit_tree,
    loads,
    predict,
)


def _train_rmse(model, X, y):
    return float(np.sqrt(np.mean((model.predict(X) - y) ** 2)))


def _split_gain_oracle(x, y, thr):
    left, right = y[x <= thr], y[x > thr]
    return len(y) * np.var(y) - len(left) * np.var(left) - len(right) * np.var(right)


class TestTree:
    def test_constant_target_is_single_leaf(self):
        X = np.random.default_rng(0).standard_normal((20, 3))
        tree = RegressionTree().fit(X, np.full(20, 4.25))
        assert tree.node_count == 1
        np.testing.assert_array_equal(tree.predict(X[:5]), 4.25)

    def test_step_data(self):
        X = np.array([[1.0], [2.0], [3.0], [4.0]])
        y = np.array([0.0, 0.0, 10.0, 10.0])
        tree = RegressionTree().fit(X, y)
        assert tree.feature_[0] == 0
        assert 2 <= tree.threshold_[0] < 3
        assert sorted(tree.value_[tree.is_leaf].tolist()) == [0.0, 10.0]
        assert _train_rmse(tree, X, y) == 0.0

    def test_root_split_is_exhaustive_optimum(self):
        rng = np.random.default_rng(5)
        X = rng.standard_normal((40, 4))
        y = X[:, 2] * 2 + rng.standard_normal(40)
        tree = RegressionTree().fit(X, y)
        best = max(
            (_split_gain_oracle(X[:, j], y, (a + b) / 2), j)
            for j in range(4)
            for a, b in zip(np.unique(X[:, j])[:-1], np.unique(X[:, j])[1:])
        )
        f, thr = tree.feature_[0], tree.threshold_[0]
        assert f == best[1]
        assert _split_gain_oracle(X[:, f], y, thr) == pytest.approx(best[0], rel=1e-12)

    def test_planted_training_rmse_below_noise(self, planted):
        tree = fit_tree(planted)
        assert _train_rmse(tree, planted.X, planted.y) < 1.0

    def test_min_samples_leaf_monotone(self, planted):
        errors = [_train_rmse(fit_tree(planted, min_samples_leaf=m), planted.X, planted.y)
                  for m in (1, 2, 5, 10, 20, 50)]
        assert errors == sorted(errors)
        for m in (5, 20):
            tree = fit_tree(planted, min_samples_leaf=m)
            assert tree.n_samples_[tree.is_leaf].min() >= m

    def test_too_few_rows(self):
        with pytest.raises(TooFewRows):
            RegressionTree(min_samples_leaf=3).fit(np.zeros((5, 1)), np.arange(5.0))

    def test_feature_mismatch(self, planted):
        tree = fit_tree(planted, min_samples_leaf=20)
        with pytest.raises(FeatureMismatch):
            tree.predict(planted.X[:, :5])

    def test_leaf_values_are_means(self, planted):
        tree = fit_tree(planted, min_samples_leaf=15)
        leaves = tree.apply(planted.X)
        for leaf in np.unique(leaves):
            assert tree.value_[leaf] == pytest.approx(planted.y[leaves == leaf].mean(), abs=1e-12)

    def test_feature_subsampling_is_seeded(self, planted):
        a = fit_tree(planted, max_features_per_split=5, rng_state=3)
        b = fit_tree(planted, max_features_per_split=5, rng_state=3)
        np.testing.assert_array_equal(a.feature_, b.feature_)
        np.testing.assert_array_equal(a.threshold_, b.threshold_)


@pytest.fixture(scope="module")
def forest(planted):
    return fit_forest(planted, n_trees=30, seed=11)


class TestForest:
    def test_prediction_is_mean_of_trees(self, forest, planted):
        manual = sum(t.predict(planted.X) for t in forest.trees_) / len(forest.trees_)
        np.testing.assert_allclose(forest.predict(planted.X), manual, rtol=0, atol=1e-12)

    def test_importances_normalised(self, forest):
        imp = forest.feature_importances_
        assert np.all(imp >= 0)
        assert imp.sum() == pytest.approx(1.0, abs=1e-9)

    def test_importances_oracle(self, forest):
        # recompute impurity credit node by node from the stored arrays
        per_tree = []
        for t in forest.trees_:
            acc = np.zeros(forest.n_features_in_)
            for i in range(t.node_count):
                if t.feature_[i] < 0:
                    continue
                l, r = t.left_[i], t.right_[i]
                drop = (t.n_samples_[i] * t.impurity_[i] - t.n_samples_[l] * t.impurity_[l]
                        - t.n_samples_[r] * t.impurity_[r])
                acc[t.feature_[i]] += drop / t.n_samples_[0]
            per_tree.append(acc)
        mean = np.mean(per_tree, axis=0)
        np.testing.assert_allclose(forest.feature_importances_, mean / mean.sum(), atol=1e-12)

    def test_determinism_and_threads(self, planted):
        a = fit_forest(planted, n_trees=12, seed=4)
        b = fit_forest(planted, n_trees=12, seed=4, n_jobs=8)
        c = fit_forest(planted, n_trees=12, seed=5)
        assert a.predict(planted.X).tobytes() == b.predict(planted.X).tobytes()
        assert not np.array_equal(a.predict(planted.X), c.predict(planted.X))

    def test_single_tree_without_bootstrap(self, planted):
        f = fit_forest(planted, n_trees=1, bootstrap=False, max_features_per_split=None, seed=0)
        t = fit_tree(planted)
        np.testing.assert_array_equal(f.predict(planted.X), t.predict(planted.X))

    def test_identical_trees(self, planted):
        f = fit_forest(planted, n_trees=5, bootstrap=False, max_features_per_split=None)
        np.testing.assert_allclose(f.predict(planted.X), f.trees_[0].predict(planted.X),
                                   rtol=0, atol=1e-12)

    def test_single_feature_importance(self):
        rng = np.random.default_rng(0)
        x = rng.standard_normal((50, 1))
        f = RandomForest(n_trees=5, seed=0).fit(x, x[:, 0] ** 2, ["only"])
        assert feature_importances(f) == {"only": 1.0}

    def test_no_splits_gives_uniform(self, caplog):
        with caplog.at_level("WARNING"):
            f = RandomForest(n_trees=3).fit(np.zeros((10, 4)), np.ones(10))
            imp = f.feature_importances_
        np.testing.assert_array_equal(imp, 0.25)
        assert "uniform" in caplog.text

    def test_planted_features_lead_importances(self):
        hits = 0
        for seed in range(20):
            t = generate_synthetic(SyntheticSpec(225, 36, 5, noise_sd=1.0, seed=seed))
            imp = feature_importances(fit_forest(t, seed=seed))
            top = sorted(imp, key=imp.get, reverse=True)[:5]
            hits += set(top) == set(t.informative_features)
        assert hits >= 16


class TestBayesianRidge:
    def test_noiseless_recovery(self):
        rng = np.random.default_rng(0)
        X = rng.standard_normal((200, 3)) * [1.0, 5.0, 0.2] + [0.0, 3.0, -1.0]
        w = np.array([1.5, -0.7, 4.0])
        m = BayesianRidge().fit(X, X @ w + 2.0)
        np.testing.assert_allclose(m.coef_, w, atol=1e-3)
        assert m.intercept_ == pytest.approx(2.0, abs=1e-3)
        assert m.alpha_ > 0 and m.lambda_ > 0

    def test_noiseless_predictions(self):
        rng = np.random.default_rng(1)
        X = rng.uniform(-3, 3, (100, 2))
        y = 3 * X[:, 0] - 2 * X[:, 1] + 1
        t = FeatureTable(("x1", "x2"), X, y)
        np.testing.assert_allclose(predict(fit_bayesian_ridge(t), t), y, atol=1e-6)

    def test_constant_target(self):
        X = np.random.default_rng(2).standard_normal((30, 4))
        m = BayesianRidge().fit(X, np.full(30, -1.5))
        assert np.max(np.abs(m.coef_)) < 1e-9
        assert m.intercept_ == pytest.approx(-1.5, abs=1e-12)

    def test_shrinks_relative_to_ols(self):
        rng = np.random.default_rng(3)
        X = rng.standard_normal((225, 36))
        y = rng.standard_normal(225)
        m = BayesianRidge().fit(X, y)
        _, b_ols = ols(X, y)
        assert np.mean(np.abs(m.coef_)) < np.mean(np.abs(b_ols))

    @pytest.mark.parametrize("alpha,lam", [(1.0, 1.0), (2.0, 0.5), (0.3, 7.0)])
    def test_frozen_precisions_is_ridge(self, alpha, lam):
        rng = np.random.default_rng(4)
        X = rng.standard_normal((60, 5)) * [1, 2, 3, 4, 5]
        y = X @ [1, 0, -1, 0.5, 0.1] + rng.standard_normal(60)
        m = BayesianRidge(fit_precisions=False, alpha_init=alpha, lambda_init=lam).fit(X, y)
        Xs = (X - X.mean(0)) / X.std(0)
        direct = np.linalg.solve(lam / alpha * np.eye(5) + Xs.T @ Xs, Xs.T @ (y - y.mean()))
        np.testing.assert_allclose(m.coef_standardized_, direct, rtol=0, atol=1e-8)

    def test_too_few_rows(self):
        with pytest.raises(TooFewRows):
            BayesianRidge().fit(np.zeros((1, 2)), np.zeros(1))

    def test_predict_reorders_table_columns(self, planted):
        m = fit_bayesian_ridge(planted)
        shuffled = planted.select(planted.feature_names)  # same order
        reordered = FeatureTable(planted.feature_names[::-1], planted.X[:, ::-1], planted.y)
        np.testing.assert_allclose(predict(m, reordered), predict(m, shuffled), atol=1e-12)
        with pytest.raises(FeatureMismatch):
            predict(m, planted.select(planted.feature_names[:3]))


class TestSerialization:
    @pytest.mark.parametrize("make", [
        lambda t: fit_tree(t, min_samples_leaf=10),
        lambda t: fit_forest(t, n_trees=4, seed=1),
        lambda t: fit_bayesian_ridge(t),
    ])
    def test_round_trip(self, planted, make):
        model = make(planted)
        text = dumps(model)
        record = json.loads(text)
        assert record["format"] == "rankselect-model" and record["version"] == 1
        back = loads(text)
        np.testing.assert_array_equal(back.predict(planted.X), model.predict(planted.X))
        assert dumps(back) == text

    def test_tree_is_nested(self, planted):
        record = json.loads(dumps(fit_tree(planted, min_samples_leaf=60)))
        assert record["kind"] == "tree"
        assert {"left", "right"} <= set(record["root"])

    def test_rejects_unknown_format(self):
        with pytest.raises(ValueError):
            loads('{"format": "other", "version": 1}')
