"""Pearson, Spearman and Kendall correlation of features against a target."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .exceptions import LengthMismatch, TooFewRows, ZeroVariance

logger = logging.getLogger(__name__)

METRICS = ("pearson", "spearman", "kendall")


def _pair(x, y):
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.shape != y.shape:
        raise LengthMismatch(f"length mismatch: {x.size} vs {y.size}")
    if x.size < 2:
        raise LengthMismatch(f"need at least 2 paired observations, got {x.size}")
    return x, y


def rank_transform(x) -> np.ndarray:
    """1-based ranks of ``x``; tied values share the average of their positions."""
    x = np.asarray(x, dtype=np.float64).ravel()
    order = np.argsort(x, kind="mergesort")
    sorted_x = x[order]
    # start index of each run of equal values
    new_run = np.concatenate(([True], sorted_x[1:] != sorted_x[:-1]))
    run_id = np.cumsum(new_run) - 1
    starts = np.flatnonzero(new_run)
    ends = np.append(starts[1:], x.size)
    avg = (starts + ends + 1) / 2.0
    ranks = np.empty(x.size, dtype=np.float64)
    ranks[order] = avg[run_id]
    return ranks


def pearson(x, y) -> float:
    """Pearson's r: centred cross-products over the root of centred sums of squares.

    Raises :class:`ZeroVariance` if either input is constant.
    """
    x, y = _pair(x, y)
    if np.all(x == x[0]) or np.all(y == y[0]):
        raise ZeroVariance("pearson correlation undefined for a constant input")
    dx = x - x.mean()
    dy = y - y.mean()
    r = np.sum(dx * dy) / np.sqrt(np.sum(dx * dx) * np.sum(dy * dy))
    return float(min(1.0, max(-1.0, r)))


def spearman(x, y) -> float:
    """Spearman's rho as Pearson's r of average-tie ranks.

    Without ties this equals ``1 - 6 * sum(d**2) / (n * (n**2 - 1))``.
    """
    x, y = _pair(x, y)
    return pearson(rank_transform(x), rank_transform(y))


def kendall(x, y) -> float:
    """Kendall's tau-a, ``(C - D) / (n (n - 1) / 2)``.

    Pairs tied in either variable count as neither concordant nor discordant.
    Direct O(n^2) pair counting.
    """
    x, y = _pair(x, y)
    n = x.size
    i, j = np.triu_indices(n, k=1)
    s = np.sign(x[i] - x[j]) * np.sign(y[i] - y[j])
    return float(np.sum(s) / (n * (n - 1) / 2.0))


_FUNCS = {"pearson": pearson, "spearman": spearman, "kendall": kendall}


@dataclass(frozen=True)
class CorrelationVector:
    """Signed correlation of each feature with the target, for one metric.

    ``constant_features`` lists features that were constant (value forced
    to 0).
    """

    metric: str
    values: dict
    n: int
    constant_features: tuple = field(default=())

    def as_array(self, features) -> np.ndarray:
        return np.array([self.values[f] for f in features], dtype=np.float64)

    def to_rows(self) -> list:
        """``(feature, value)`` pairs sorted by |value| descending, then name."""
        return sorted(self.values.items(), key=lambda kv: (-abs(kv[1]), kv[0]))


def correlate_all(table, metric: str) -> CorrelationVector:
    """Correlate every feature of ``table`` with its target using ``metric``.

    A constant feature (or constant target) gets value 0 and is reported in
    ``constant_features`` with a logged warning instead of raising.
    """
    try:
        func = _FUNCS[metric]
    except KeyError:
        raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}") from None
    if table.n_rows < 2:
        raise TooFewRows(f"need at least 2 rows to correlate, got {table.n_rows}")
    y = table.y
    values, constant = {}, []
    target_constant = bool(np.all(y == y[0]))
    for j, name in enumerate(table.feature_names):
        x = table.X[:, j]
        if target_constant or np.all(x == x[0]):
            values[name] = 0.0
            constant.append(name)
        else:
            values[name] = func(x, y)
    if constant:
        logger.warning("%s: %d constant column(s) given correlation 0: %s",
                       metric, len(constant), ", ".join(constant))
    return CorrelationVector(metric=metric, values=values, n=table.n_rows,
                             constant_features=tuple(constant))
