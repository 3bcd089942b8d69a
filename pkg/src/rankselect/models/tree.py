"""CART regression tree grown by exhaustive variance-reduction splitting."""

from __future__ import annotations

import numpy as np

from ..exceptions import FeatureMismatch, TooFewRows

# relative size below which a variance reduction is treated as round-off
_GAIN_RTOL = 1e-10


def _resolve_max_features(max_features, n_features: int) -> int:
    if max_features is None:
        return n_features
    if max_features == "third":
        return max(1, n_features // 3)
    if isinstance(max_features, float) and 0 < max_features <= 1:
        return max(1, int(max_features * n_features))
    m = int(max_features)
    if m < 1:
        raise ValueError(f"max_features must be >= 1, got {max_features!r}")
    return min(m, n_features)


def _best_split(Xn, yn, min_samples_leaf):
    """Best (column, threshold, gain) over the columns of ``Xn``, or None.

    Gain is the drop in the sum of squared deviations from the node mean.
    Candidate thresholds are midpoints between consecutive distinct values.
    """
    m = yn.shape[0]
    yc = yn - yn.mean()
    order = np.argsort(Xn, axis=0, kind="stable")
    xs = np.take_along_axis(Xn, order, axis=0)
    ys = yc[order]

    left_sum = np.cumsum(ys, axis=0)[:-1]
    total = left_sum[-1] + ys[-1]
    n_left = np.arange(1, m, dtype=np.float64)[:, None]
    n_right = m - n_left
    gain = left_sum ** 2 / n_left + (total - left_sum) ** 2 / n_right - total ** 2 / m

    valid = xs[1:] > xs[:-1]
    if min_samples_leaf > 1:
        valid[: min_samples_leaf - 1] = False
        valid[m - min_samples_leaf:] = False
    gain = np.where(valid, gain, -np.inf)

    # column-major argmax: ties go to the lowest column, then lowest position
    flat = int(np.argmax(gain.T))
    col, pos = divmod(flat, m - 1)
    best = gain[pos, col]
    sse = float(np.dot(yc, yc))
    if not np.isfinite(best) or best <= _GAIN_RTOL * sse:
        return None
    lo, hi = xs[pos, col], xs[pos + 1, col]
    threshold = (lo + hi) / 2.0
    if threshold >= hi:  # adjacent floats: midpoint rounds up to hi
        threshold = lo
    return col, float(threshold), float(best)


class RegressionTree:
    """Regression tree stored as parallel node arrays.

    Node 0 is the root. For an internal node ``i``, samples with
    ``x[feature[i]] <= threshold[i]`` go to ``left[i]``, the rest to
    ``right[i]``; leaves have ``feature[i] == -1`` and predict ``value[i]``,
    the mean training target that reached them. ``impurity`` is the
    (population) variance of the targets at each node.
    """

    def __init__(self, min_samples_leaf=1, max_features=None, random_state=None):
        self.min_samples_leaf = min_samples_leaf
        self.max_features = max_features
        self.random_state = random_state

    def fit(self, X, y, feature_names=None):
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        n, p = X.shape
        msl = int(self.min_samples_leaf)
        if msl < 1:
            raise ValueError("min_samples_leaf must be >= 1")
        if n < 2 * msl:
            raise TooFewRows(f"need at least {2 * msl} rows for min_samples_leaf={msl}, got {n}")
        mtry = _resolve_max_features(self.max_features, p)
        rng = np.random.default_rng(self.random_state)

        feature, threshold, left, right = [], [], [], []
        value, n_samples, impurity = [], [], []

        def new_node(idx):
            yn = y[idx]
            feature.append(-1)
            threshold.append(np.nan)
            left.append(-1)
            right.append(-1)
            value.append(float(yn.mean()))
            n_samples.append(int(idx.size))
            impurity.append(float(np.var(yn)))
            return len(feature) - 1

        stack = [(new_node(np.arange(n)), np.arange(n))]
        while stack:
            node, idx = stack.pop()
            if idx.size < 2 * msl or impurity[node] == 0.0:
                continue
            if mtry < p:
                cols = np.sort(rng.choice(p, size=mtry, replace=False))
            else:
                cols = np.arange(p)
            split = _best_split(X[np.ix_(idx, cols)], y[idx], msl)
            if split is None:
                continue
            c, thr, _ = split
            f = int(cols[c])
            go_left = X[idx, f] <= thr
            li, ri = idx[go_left], idx[~go_left]
            feature[node] = f
            threshold[node] = thr
            left[node] = new_node(li)
            right[node] = new_node(ri)
            # right pushed first so the left subtree is expanded first
            stack.append((right[node], ri))
            stack.append((left[node], li))

        self.feature_ = np.array(feature, dtype=np.intp)
        self.threshold_ = np.array(threshold, dtype=np.float64)
        self.left_ = np.array(left, dtype=np.intp)
        self.right_ = np.array(right, dtype=np.intp)
        self.value_ = np.array(value, dtype=np.float64)
        self.n_samples_ = np.array(n_samples, dtype=np.intp)
        self.impurity_ = np.array(impurity, dtype=np.float64)
        self.n_features_in_ = p
        self.feature_names_in_ = tuple(feature_names) if feature_names is not None else None
        return self

    @property
    def node_count(self) -> int:
        return self.feature_.size

    @property
    def is_leaf(self) -> np.ndarray:
        return self.feature_ < 0

    def apply(self, X) -> np.ndarray:
        """Index of the leaf reached by each row."""
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.n_features_in_:
            raise FeatureMismatch(
                f"expected {self.n_features_in_} feature columns, got shape {X.shape}")
        node = np.zeros(X.shape[0], dtype=np.intp)
        rows = np.arange(X.shape[0])
        active = self.feature_[node] >= 0
        while active.any():
            r, nd = rows[active], node[active]
            go_left = X[r, self.feature_[nd]] <= self.threshold_[nd]
            node[r] = np.where(go_left, self.left_[nd], self.right_[nd])
            active = self.feature_[node] >= 0
        return node

    def predict(self, X) -> np.ndarray:
        return self.value_[self.apply(X)]

    def impurity_decrease(self) -> np.ndarray:
        """Per-feature sum of ``n_node / n_root * (var_node - weighted child var)``."""
        out = np.zeros(self.n_features_in_)
        internal = np.flatnonzero(self.feature_ >= 0)
        if internal.size == 0:
            return out
        n, imp = self.n_samples_, self.impurity_
        li, ri = self.left_[internal], self.right_[internal]
        weighted = n[internal] * imp[internal] - n[li] * imp[li] - n[ri] * imp[ri]
        np.add.at(out, self.feature_[internal], np.maximum(weighted, 0.0) / n[0])
        return out
