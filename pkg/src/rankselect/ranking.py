"""Rankings of features: construction, Borda fusion, top-k and concordance."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .correlation import METRICS, CorrelationVector, correlate_all, kendall
from .exceptions import ItemSetMismatch

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Ranking:
    """An ordering of distinct items; position 1 is the most important."""

    items: tuple

    def __post_init__(self):
        items = tuple(self.items)
        if len(set(items)) != len(items):
            raise ValueError("ranking items must be distinct")
        object.__setattr__(self, "items", items)

    @classmethod
    def from_positions(cls, positions: Mapping[str, int]) -> "Ranking":
        n = len(positions)
        if sorted(positions.values()) != list(range(1, n + 1)):
            raise ValueError("positions must be a bijection onto 1..N")
        return cls(tuple(sorted(positions, key=positions.__getitem__)))

    @property
    def positions(self) -> dict:
        return {item: i + 1 for i, item in enumerate(self.items)}

    def position(self, item) -> int:
        return self.items.index(item) + 1

    def reversed(self) -> "Ranking":
        return Ranking(self.items[::-1])

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def to_rows(self) -> list:
        """``(position, item)`` pairs in rank order."""
        return [(i + 1, item) for i, item in enumerate(self.items)]


@dataclass(frozen=True)
class BordaScores:
    """Summed Borda points per item over ``n_rankings`` input rankings."""

    scores: dict
    n_rankings: int

    def __getitem__(self, item):
        return self.scores[item]


def rank_by_strength(corr: CorrelationVector) -> Ranking:
    """Order features by |correlation|, strongest first.

    Ties go to the ascending feature name, except that features flagged as
    constant sort after any non-constant feature with the same |value|.
    """
    if not corr.values:
        raise ValueError("correlation vector is empty")
    constant = set(corr.constant_features)
    key = lambda kv: (-abs(kv[1]), kv[0] in constant, kv[0])  # noqa: E731
    return Ranking(tuple(name for name, _ in sorted(corr.values.items(), key=key)))


def _check_same_items(rankings: Sequence[Ranking]) -> frozenset:
    reference = frozenset(rankings[0].items)
    for r in rankings[1:]:
        if frozenset(r.items) != reference:
            raise ItemSetMismatch("rankings do not share the same item set")
    return reference


def borda(rankings: Sequence[Ranking]) -> BordaScores:
    """Borda count: item j scores ``sum_i (N - pos_i(j) + 1)`` over the M rankings."""
    rankings = list(rankings)
    if not rankings:
        raise ValueError("borda needs at least one ranking")
    _check_same_items(rankings)
    n = len(rankings[0])
    scores = {item: 0 for item in sorted(rankings[0].items)}
    for r in rankings:
        for pos, item in enumerate(r.items, start=1):
            scores[item] += n - pos + 1
    return BordaScores(scores=scores, n_rankings=len(rankings))


def rank_from_scores(scores: BordaScores | Mapping[str, float]) -> Ranking:
    """Descending score; ties broken by ascending item name."""
    values = scores.scores if isinstance(scores, BordaScores) else scores
    if not values:
        raise ValueError("no scores to rank")
    return Ranking(tuple(sorted(values, key=lambda item: (-values[item], item))))


def top_k(ranking: Ranking, k: int) -> tuple:
    """First ``min(k, N)`` items of ``ranking``, in rank order."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > len(ranking):
        logger.warning("k=%d exceeds the %d ranked items; using all of them", k, len(ranking))
    return ranking.items[:k]


def _position_vectors(r1: Ranking, r2: Ranking):
    _check_same_items([r1, r2])
    p1, p2 = r1.positions, r2.positions
    items = sorted(p1)
    return (np.array([p1[i] for i in items], dtype=np.float64),
            np.array([p2[i] for i in items], dtype=np.float64))


def concordance(r1: Ranking, r2: Ranking) -> float:
    """Kendall's tau between the position vectors of two rankings."""
    a, b = _position_vectors(r1, r2)
    if a.size < 2:
        return 1.0
    return kendall(a, b)


@dataclass(frozen=True)
class ConcordanceReport:
    """Agreement among the per-metric rankings and with their Borda fusion.

    ``mean_pairwise`` averages the three pairwise concordances of the metric
    rankings; ``mean_vs_borda`` averages the concordance of the fused
    ranking with each of them. ``pairwise`` holds the individual values,
    keyed ``"a~b"``.
    """

    mean_pairwise: float
    mean_vs_borda: float
    pairwise: dict

    def as_dict(self) -> dict:
        return {"mean_pairwise": self.mean_pairwise,
                "mean_vs_borda": self.mean_vs_borda,
                **{f"tau[{k}]": v for k, v in self.pairwise.items()}}


def concordance_report(r_p: Ranking, r_s: Ranking, r_k: Ranking, r_b: Ranking) -> ConcordanceReport:
    named = {"pearson": r_p, "spearman": r_s, "kendall": r_k}
    _check_same_items([r_p, r_s, r_k, r_b])
    pairwise = {}
    for a, b in itertools.combinations(named, 2):
        pairwise[f"{a}~{b}"] = concordance(named[a], named[b])
    vs_borda = {}
    for a in named:
        vs_borda[f"borda~{a}"] = concordance(r_b, named[a])
    return ConcordanceReport(
        mean_pairwise=float(np.mean(list(pairwise.values()))),
        mean_vs_borda=float(np.mean(list(vs_borda.values()))),
        pairwise={**pairwise, **vs_borda},
    )


def metric_rankings(table):
    """Per-metric rankings of ``table``'s features plus their Borda fusion.

    Returns ``(rankings, correlations)``: rankings keyed pearson, spearman,
    kendall and borda; correlation vectors keyed by metric.
    """
    corrs = {m: correlate_all(table, m) for m in METRICS}
    ranks = {m: rank_by_strength(c) for m, c in corrs.items()}
    ranks["borda"] = rank_from_scores(borda([ranks[m] for m in METRICS]))
    return ranks, corrs
