"""Experiment harness: rank, select top-k, train, and score on held-out rows.

For each (location, season) table the three correlation rankings are fused
with Borda count and the top-k features (``sel_agg``) are compared with
the top-k random-forest importances (``sel_rf``) and with using every
feature. Variants are named ``rf_base``, ``rf_1`` (forest on ``sel_agg``),
``rf_2`` (forest on ``sel_rf``) and ``bay_base``, ``bay_1``, ``bay_2`` for
Bayesian ridge.
"""

from __future__ import annotations

import logging
import math
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .data_io import SEASONS, FeatureTable
from .exceptions import Empty, LengthMismatch, TooFewRows, UnknownFeature
from .models import BayesianRidge, RandomForest
from .ranking import (
    ConcordanceReport,
    concordance_report,
    metric_rankings,
    rank_from_scores,
    top_k,
)

logger = logging.getLogger(__name__)

MODEL_KINDS = ("forest", "bayesian_ridge")
SELECTIONS = ("base", "agg", "rf_importance")
_PREFIX = {"forest": "rf", "bayesian_ridge": "bay"}
_SUFFIX = {"base": "base", "agg": "1", "rf_importance": "2"}
VARIANTS = tuple(f"{_PREFIX[m]}_{_SUFFIX[s]}" for m in MODEL_KINDS for s in SELECTIONS)


def variant_name(model_kind: str, selection: str) -> str:
    return f"{_PREFIX[model_kind]}_{_SUFFIX[selection]}"


def rmse(actual, predicted) -> float:
    """Root mean squared error."""
    a = np.asarray(actual, dtype=np.float64).ravel()
    p = np.asarray(predicted, dtype=np.float64).ravel()
    if a.shape != p.shape:
        raise LengthMismatch(f"length mismatch: {a.size} vs {p.size}")
    if a.size == 0:
        raise Empty("rmse of empty sequences")
    d = a - p
    return math.sqrt(float(np.dot(d, d)) / a.size)


@dataclass(frozen=True)
class ForestParams:
    n_trees: int = 100
    max_features_per_split: object = "third"
    min_samples_leaf: int = 1


@dataclass(frozen=True)
class RidgeParams:
    max_iter: int = 300
    tol: float = 1e-3


@dataclass(frozen=True)
class ExperimentConfig:
    """Settings shared by every cell of an experiment.

    ``chronological=True`` holds out the last rows instead of a random
    subset. Cells with fewer than ``min_rows`` rows are skipped by
    :func:`run_grid`.
    """

    k_values: tuple = (5, 10, 15, 20, 25)
    test_fraction: float = 0.20
    seed: int = 0
    forest: ForestParams = field(default_factory=ForestParams)
    ridge: RidgeParams = field(default_factory=RidgeParams)
    locations: tuple = ()
    selection_variants: tuple = SELECTIONS
    models: tuple = MODEL_KINDS
    chronological: bool = False
    min_rows: int = 25
    n_jobs: int = 1

    def __post_init__(self):
        object.__setattr__(self, "k_values", tuple(int(k) for k in self.k_values))
        object.__setattr__(self, "selection_variants", tuple(self.selection_variants))
        object.__setattr__(self, "models", tuple(self.models))
        object.__setattr__(self, "locations", tuple(self.locations))
        if not 0 < self.test_fraction < 1:
            raise ValueError(f"test_fraction must be in (0, 1), got {self.test_fraction}")
        if not self.k_values or min(self.k_values) < 1:
            raise ValueError("k_values must be non-empty and positive")
        if set(self.selection_variants) - set(SELECTIONS):
            raise ValueError(f"selection_variants must be a subset of {SELECTIONS}")
        if set(self.models) - set(MODEL_KINDS):
            raise ValueError(f"models must be a subset of {MODEL_KINDS}")

    def as_dict(self) -> dict:
        return asdict(self)


def cell_seed(root_seed: int, location: str = "", season: str = "") -> np.random.SeedSequence:
    """Seed stream for one (location, season) cell.

    Depends only on the root seed and the cell identity (not on ``k``), so
    a cell reproduces in isolation and ``rf_base`` is shared across a k sweep.
    """
    key = (zlib.crc32(location.encode("utf-8")), zlib.crc32(season.encode("utf-8")))
    return np.random.SeedSequence(entropy=root_seed, spawn_key=key)


def train_test_indices(n_rows: int, test_fraction: float, rng=None, chronological=False):
    """Row indices ``(train, test)``; the test part has ``ceil(test_fraction * n)`` rows."""
    n_test = math.ceil(test_fraction * n_rows)
    if n_test < 1 or n_rows - n_test < 2:
        raise TooFewRows(f"cannot split {n_rows} rows with test_fraction={test_fraction}")
    if chronological:
        order = np.arange(n_rows)
    else:
        order = np.random.default_rng(rng).permutation(n_rows)
    return np.sort(order[: n_rows - n_test]), np.sort(order[n_rows - n_test:])


def _make_model(kind: str, cfg: ExperimentConfig, forest_seed: int):
    if kind == "forest":
        fp = cfg.forest
        return RandomForest(n_trees=fp.n_trees, max_features=fp.max_features_per_split,
                            min_samples_leaf=fp.min_samples_leaf, seed=forest_seed)
    if kind == "bayesian_ridge":
        return BayesianRidge(max_iter=cfg.ridge.max_iter, tol=cfg.ridge.tol)
    raise ValueError(f"unknown model kind {kind!r}")


class _Evaluator:
    """One shared split and forest seed; fits memoised by feature set."""

    def __init__(self, table: FeatureTable, cfg: ExperimentConfig, seed_seq):
        if table.dates is not None and cfg.chronological:
            table = table.take(np.argsort(table.dates, kind="stable"))
        self.table = table
        self.cfg = cfg
        split_ss, forest_ss = seed_seq.spawn(2)
        self.train, self.test = train_test_indices(
            table.n_rows, cfg.test_fraction, split_ss, cfg.chronological)
        self.forest_seed = int(forest_ss.generate_state(1, np.uint64)[0])
        self._memo = {}

    def score(self, kind: str, features=None):
        t = self.table if features is None else self.table.select(features)
        key = (kind, t.feature_names)
        if key not in self._memo:
            model = _make_model(kind, self.cfg, self.forest_seed)
            model.fit(t.X[self.train], t.y[self.train], t.feature_names)
            err = rmse(t.y[self.test], model.predict(t.X[self.test]))
            self._memo[key] = (err, model)
        return self._memo[key]


def _resolve_seed(cfg, seed):
    if seed is None:
        return cell_seed(cfg.seed)
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return cell_seed(int(seed))


def learn_validate(model_kind: str, table: FeatureTable, feature_subset=None,
                   cfg: ExperimentConfig | None = None, seed=None) -> float:
    """Test-set RMSE of ``model_kind`` trained on a seeded 80/20-style split.

    ``feature_subset`` restricts the columns (kept in table order); None
    uses all features. ``seed`` is an int root seed or a SeedSequence from
    :func:`cell_seed`; by default ``cell_seed(cfg.seed)``.
    """
    cfg = cfg or ExperimentConfig()
    if feature_subset is not None:
        unknown = set(feature_subset).difference(table.feature_names)
        if unknown:
            raise UnknownFeature(f"unknown features: {sorted(unknown)}")
    return _Evaluator(table, cfg, _resolve_seed(cfg, seed)).score(model_kind, feature_subset)[0]


@dataclass(frozen=True)
class ExperimentResult:
    location: str
    season: str
    k: int
    rmse: dict
    selected_features: dict
    concordance: ConcordanceReport
    n_train: int
    n_test: int

    def to_record(self) -> dict:
        return {
            "location": self.location, "season": self.season, "k": self.k,
            "rmse": dict(self.rmse),
            "selected_features": {k: list(v) for k, v in self.selected_features.items()},
            "concordance": self.concordance.as_dict(),
            "n_train": self.n_train, "n_test": self.n_test,
        }


def _evaluate_cell(table, k_values, cfg, location="", season="", seed=None):
    ev = _Evaluator(table, cfg, seed if seed is not None else cell_seed(cfg.seed, location, season))
    ranks, _ = metric_rankings(table)
    report = concordance_report(ranks["pearson"], ranks["spearman"], ranks["kendall"], ranks["borda"])

    need_rf_ranking = "rf_importance" in cfg.selection_variants
    rf_ranking = None
    if need_rf_ranking:
        _, rf_base = ev.score("forest")
        rf_ranking = rank_from_scores(dict(zip(rf_base.feature_names_in_,
                                               rf_base.feature_importances_.tolist())))

    results = []
    for k in k_values:
        selections = {"base": None}
        if "agg" in cfg.selection_variants:
            selections["agg"] = top_k(ranks["borda"], k)
        if need_rf_ranking:
            selections["rf_importance"] = top_k(rf_ranking, k)
        errors = {}
        for kind in cfg.models:
            for sel in cfg.selection_variants:
                errors[variant_name(kind, sel)] = ev.score(kind, selections[sel])[0]
        results.append(ExperimentResult(
            location=location, season=season, k=int(k), rmse=errors,
            selected_features={s: tuple(f) for s, f in selections.items() if f is not None},
            concordance=report, n_train=int(ev.train.size), n_test=int(ev.test.size),
        ))
    return results


def run_cell(table: FeatureTable, k: int, cfg: ExperimentConfig | None = None,
             location: str = "", season: str = "", seed=None) -> ExperimentResult:
    """Run the full rank-select-validate procedure on one table for one ``k``."""
    cfg = cfg or ExperimentConfig()
    seed = None if seed is None else _resolve_seed(cfg, seed)
    return _evaluate_cell(table, [k], cfg, location, season, seed)[0]


def _season_order(seasons):
    known = [s for s in SEASONS if s in seasons]
    return known + sorted(s for s in seasons if s not in SEASONS)


def run_grid(datasets: Mapping[str, Mapping[str, FeatureTable]],
             cfg: ExperimentConfig | None = None,
             skipped: list | None = None) -> list:
    """Evaluate every location x season x k cell.

    Results come in (location, season, k) order: locations as given,
    seasons DJF, MAM, JJA, SON, then k as configured. Cells whose table has
    fewer than ``cfg.min_rows`` rows, or fails validation, are skipped; a
    ``(location, season, reason)`` tuple is logged and appended to
    ``skipped`` when provided.
    """
    cfg = cfg or ExperimentConfig()
    if not datasets:
        raise ValueError("no datasets given")
    jobs = []
    for loc, seasons in datasets.items():
        for season in _season_order(seasons):
            jobs.append((loc, season, seasons[season]))

    def work(job):
        loc, season, table = job
        if table.n_rows < cfg.min_rows:
            return (loc, season, f"{table.n_rows} rows < min_rows={cfg.min_rows}")
        try:
            return _evaluate_cell(table, cfg.k_values, cfg, loc, season)
        except (ValueError, ArithmeticError) as exc:
            return (loc, season, f"{type(exc).__name__}: {exc}")

    if cfg.n_jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.n_jobs) as pool:
            outcomes = list(pool.map(work, jobs))
    else:
        outcomes = [work(j) for j in jobs]

    results = []
    for out in outcomes:
        if isinstance(out, tuple):
            logger.warning("skipping cell %s/%s: %s", *out)
            if skipped is not None:
                skipped.append(out)
        else:
            results.extend(out)
    return results


def random_selection(features: Sequence[str], k: int, rng) -> tuple:
    """``k`` features drawn uniformly without replacement (selection baseline)."""
    rng = np.random.default_rng(rng)
    idx = np.sort(rng.choice(len(features), size=min(k, len(features)), replace=False))
    return tuple(features[i] for i in idx)
