"""Experiment orchestration: configs, designs and result files."""

from qarank.harness.config import (
    DESIGNS,
    ConfigError,
    CVConfig,
    ExperimentConfig,
    FeatureSelectionConfig,
    LearnerEntry,
    TimewiseConfig,
    TuningConfig,
    load_config,
)
from qarank.harness.data import FeatureCsv, FoldFeatures, SchemaError, cap_threads, resolve
from qarank.harness.designs import (
    derive_seed,
    evaluate_cv,
    rating_variant,
    run_ablation,
    run_corner_cases,
    run_cross_platform,
    run_experiment,
    run_feature_selection,
    run_timewise,
    run_within_cv,
    single_answer_variant,
    tune_entries,
)
from qarank.harness.result import ExperimentResult
from qarank.harness.selection import SelectionResult, select_features
from qarank.harness.timewise import TimeBatch, timewise_batches

__all__ = [
    "DESIGNS", "ConfigError", "CVConfig", "ExperimentConfig", "FeatureSelectionConfig", "LearnerEntry",
    "TimewiseConfig", "TuningConfig", "load_config", "FeatureCsv", "FoldFeatures", "SchemaError",
    "cap_threads", "resolve", "derive_seed", "evaluate_cv", "rating_variant", "run_ablation",
    "run_corner_cases", "run_cross_platform", "run_experiment", "run_feature_selection", "run_timewise",
    "run_within_cv", "single_answer_variant", "tune_entries", "ExperimentResult", "SelectionResult",
    "select_features", "TimeBatch", "timewise_batches",
]
