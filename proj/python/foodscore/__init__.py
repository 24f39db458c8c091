"""Food health scores from plain-text food descriptions."""

from ._foodscore import (
    FoodscoreError,
    default_scoring_config,
    error_stats,
    final_transform,
    ingest,
    pearson,
    predict,
    scale_score,
    score_profile,
    target_names,
    train,
    validate,
)

__all__ = [
    "FoodscoreError",
    "default_scoring_config",
    "error_stats",
    "final_transform",
    "ingest",
    "pearson",
    "predict",
    "scale_score",
    "score_profile",
    "target_names",
    "train",
    "validate",
]
