"""Cross-validation, classification metrics and feature relevance tests."""

from .experiment import (
    METRICS_COLUMNS,
    ExperimentConfig,
    ExperimentResult,
    ModelResult,
    read_metrics_csv,
    run_experiment,
    write_artifacts,
    write_metrics_csv,
    write_roc_csv,
)
from .folds import FoldMasks, fold_seed, kfold
from .metrics import MetricsRow, RocCurve, auc_roc, classification_metrics, confusion, macro_average
from .selection import (
    FEATURE_STATS_COLUMNS,
    FeatureStat,
    chi2_sf,
    chi_square,
    chi_square_p,
    contingency,
    discretize,
    entropy,
    feature_stats,
    feature_stats_table,
    gain_ratio,
    info_gain,
    permutation_p,
    write_feature_stats,
)
