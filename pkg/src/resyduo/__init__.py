"""Collaborative-filtering recommender for IoT hardware components and
software libraries: corpus projections, a KNN engine, evaluation and
tuning harnesses, and an HTTP service."""

from .corpus import (
    ComponentRef,
    Corpus,
    ProjectRecord,
    SourceFile,
    generate_synthetic_corpus,
    load_corpus,
    parse_corpus,
    serialize_corpus,
)
from .engine import (
    KnnConfig,
    Prediction,
    RecommendationList,
    SimilarityModel,
    batch_estimates,
    build_similarity_model,
    compute_similarity,
    fold_in,
    predict,
    top_n,
)
from .errors import ResyduoError
from .evaluation import (
    AccuracyReport,
    EvaluationReport,
    FoldPlan,
    RankingReport,
    accuracy_metrics,
    cross_validate,
    error_metrics,
    kfold_split,
    report_to_csv,
    report_to_json,
)
from .matrix import RatingMatrix
from .persistence import load_model, save_model
from .projections import CutoffConfig, apply_cutoff, build_projection, normalize_tag
from .tuning import GridSpec, TuningResult, enumerate_grid, grid_search, scoreboard_to_csv

__version__ = "0.1.0"

__all__ = [
    "ComponentRef",
    "Corpus",
    "ProjectRecord",
    "SourceFile",
    "generate_synthetic_corpus",
    "load_corpus",
    "parse_corpus",
    "serialize_corpus",
    "KnnConfig",
    "Prediction",
    "RecommendationList",
    "SimilarityModel",
    "batch_estimates",
    "build_similarity_model",
    "compute_similarity",
    "fold_in",
    "predict",
    "top_n",
    "ResyduoError",
    "AccuracyReport",
    "EvaluationReport",
    "FoldPlan",
    "RankingReport",
    "accuracy_metrics",
    "cross_validate",
    "error_metrics",
    "kfold_split",
    "report_to_csv",
    "report_to_json",
    "RatingMatrix",
    "load_model",
    "save_model",
    "CutoffConfig",
    "apply_cutoff",
    "build_projection",
    "normalize_tag",
    "GridSpec",
    "TuningResult",
    "enumerate_grid",
    "grid_search",
    "scoreboard_to_csv",
    "__version__",
]
