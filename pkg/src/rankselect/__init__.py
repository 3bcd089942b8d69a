"""Correlation-ranking feature selection with Borda fusion and model validation."""

__version__ = "0.1.0"

from .correlation import CorrelationVector, correlate_all, kendall, pearson, rank_transform, spearman
from .data_io import (
    SEASONS,
    FeatureTable,
    SyntheticSpec,
    generate_synthetic,
    load_table,
    split_by_season,
    write_table,
)
from .evaluation import ExperimentConfig, ExperimentResult, learn_validate, rmse, run_cell, run_grid
from .ranking import (
    BordaScores,
    Ranking,
    borda,
    concordance,
    concordance_report,
    rank_by_strength,
    rank_from_scores,
    top_k,
)

__all__ = [
    "CorrelationVector", "correlate_all", "kendall", "pearson", "rank_transform", "spearman",
    "SEASONS", "FeatureTable", "SyntheticSpec", "generate_synthetic", "load_table",
    "split_by_season", "write_table",
    "ExperimentConfig", "ExperimentResult", "learn_validate", "rmse", "run_cell", "run_grid",
    "BordaScores", "Ranking", "borda", "concordance", "concordance_report",
    "rank_by_strength", "rank_from_scores", "top_k",
]
