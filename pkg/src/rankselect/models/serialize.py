"""JSON records for fitted models.

Trees become nested ``{"feature", "threshold", "left", "right"}`` records
with ``{"value", "n"}`` leaves; a ridge model becomes a weight table. Every
document carries ``format`` and ``version`` keys.
"""

from __future__ import annotations

import json

import numpy as np

from .bayes import BayesianRidge
from .forest import RandomForest
from .tree import RegressionTree

FORMAT = "rankselect-model"
VERSION = 1


def _names(model):
    names = model.feature_names_in_
    return list(names) if names is not None else [f"x{j}" for j in range(model.n_features_in_)]


def _tree_node(tree, i, names):
    rec = {"n": int(tree.n_samples_[i]), "impurity": float(tree.impurity_[i]),
           "value": float(tree.value_[i])}
    if tree.feature_[i] >= 0:
        rec.update(feature=names[tree.feature_[i]], threshold=float(tree.threshold_[i]),
                   left=_tree_node(tree, tree.left_[i], names),
                   right=_tree_node(tree, tree.right_[i], names))
    return rec


def _tree_from_node(root, names, params=None):
    index = {n: j for j, n in enumerate(names)}
    cols = {k: [] for k in ("feature", "threshold", "left", "right", "value", "n", "impurity")}

    def visit(rec):
        i = len(cols["value"])
        internal = "feature" in rec
        cols["feature"].append(index[rec["feature"]] if internal else -1)
        cols["threshold"].append(rec["threshold"] if internal else np.nan)
        cols["left"].append(-1)
        cols["right"].append(-1)
        cols["value"].append(rec["value"])
        cols["n"].append(rec["n"])
        cols["impurity"].append(rec["impurity"])
        if internal:
            cols["left"][i] = visit(rec["left"])
            cols["right"][i] = visit(rec["right"])
        return i

    visit(root)
    tree = RegressionTree(**(params or {}))
    tree.feature_ = np.array(cols["feature"], dtype=np.intp)
    tree.threshold_ = np.array(cols["threshold"], dtype=np.float64)
    tree.left_ = np.array(cols["left"], dtype=np.intp)
    tree.right_ = np.array(cols["right"], dtype=np.intp)
    tree.value_ = np.array(cols["value"], dtype=np.float64)
    tree.n_samples_ = np.array(cols["n"], dtype=np.intp)
    tree.impurity_ = np.array(cols["impurity"], dtype=np.float64)
    tree.n_features_in_ = len(names)
    tree.feature_names_in_ = tuple(names)
    return tree


def model_to_record(model) -> dict:
    names = _names(model)
    head = {"format": FORMAT, "version": VERSION, "features": names}
    if isinstance(model, RegressionTree):
        return {**head, "kind": "tree",
                "params": {"min_samples_leaf": model.min_samples_leaf,
                           "max_features": model.max_features},
                "root": _tree_node(model, 0, names)}
    if isinstance(model, RandomForest):
        return {**head, "kind": "forest",
                "params": {"n_trees": model.n_trees, "max_features": model.max_features,
                           "min_samples_leaf": model.min_samples_leaf,
                           "bootstrap": model.bootstrap, "seed": model.seed},
                "importances": dict(zip(names, model.feature_importances_.tolist())),
                "trees": [_tree_node(t, 0, names) for t in model.trees_]}
    if isinstance(model, BayesianRidge):
        return {**head, "kind": "bayesian_ridge",
                "params": {"max_iter": model.max_iter, "tol": model.tol},
                "alpha": model.alpha_, "lambda": model.lambda_, "n_iter": model.n_iter_,
                "intercept": model.intercept_, "y_mean": model.y_mean_,
                "weights": [{"feature": f, "weight": float(w), "weight_standardized": float(ws),
                             "mean": float(m), "scale": float(s)}
                            for f, w, ws, m, s in zip(names, model.coef_,
                                                      model.coef_standardized_,
                                                      model.x_mean_, model.x_scale_)]}
    raise TypeError(f"cannot serialise {type(model).__name__}")


def model_from_record(rec: dict):
    if rec.get("format") != FORMAT:
        raise ValueError("not a rankselect model record")
    if rec.get("version") != VERSION:
        raise ValueError(f"unsupported model record version {rec.get('version')!r}")
    names = rec["features"]
    kind = rec["kind"]
    if kind == "tree":
        return _tree_from_node(rec["root"], names, rec["params"])
    if kind == "forest":
        p = rec["params"]
        forest = RandomForest(**p)
        forest.trees_ = [_tree_from_node(t, names) for t in rec["trees"]]
        forest.n_features_in_ = len(names)
        forest.feature_names_in_ = tuple(names)
        return forest
    if kind == "bayesian_ridge":
        model = BayesianRidge(**rec["params"])
        w = rec["weights"]
        model.coef_ = np.array([r["weight"] for r in w])
        model.coef_standardized_ = np.array([r["weight_standardized"] for r in w])
        model.x_mean_ = np.array([r["mean"] for r in w])
        model.x_scale_ = np.array([r["scale"] for r in w])
        model.intercept_ = rec["intercept"]
        model.y_mean_ = rec["y_mean"]
        model.alpha_ = rec["alpha"]
        model.lambda_ = rec["lambda"]
        model.n_iter_ = rec["n_iter"]
        model.n_features_in_ = len(names)
        model.feature_names_in_ = tuple(names)
        return model
    raise ValueError(f"unknown model kind {kind!r}")


def dumps(model, indent=None) -> str:
    return json.dumps(model_to_record(model), indent=indent)


def loads(text: str):
    return model_from_record(json.loads(text))
