"""Gradient tree boosting on graphs with lazily grown labelled-path features."""

from .anchors import (
    AnchorConfig,
    anchor_nodes,
    anchor_sets,
    detect_categorical_columns,
    rare_label_filter,
    resolve_allowed_labels,
    select_anchor_attribute,
    with_anchor_attribute,
)
from .boosting import (
    BoostConfig,
    BoostModel,
    ConfigError,
    ImportanceRow,
    IterationRecord,
    ModelError,
    PreparedData,
    ScoreRecord,
    Stage,
    importance,
    init_intercept,
    load_model,
    logistic_loss,
    mean_training_loss,
    predict,
    predict_prepared,
    prepare,
    pseudo_residuals,
    save_model,
    sigmoid,
    train,
    train_prepared,
)
from .evaluation import (
    CVPlan,
    CVReport,
    FoldResult,
    GridSpec,
    LearningCurve,
    accuracy,
    f1_macro,
    fold_assignments,
    learning_curve,
    make_folds,
    regression_metrics,
    run_cv,
)
from .features import (
    CountMatrix,
    FeatureCache,
    averaged_edge_attributes,
    averaged_node_attributes,
    build_count_matrix,
    extended_feature_row,
    feature_row_length,
    feature_row_names,
    prefixes,
)
from .graphs import (
    Dataset,
    Graph,
    edge_attributes,
    neighbors,
    validate_graph,
)
from .paths import (
    LabelledPath,
    PrefixStats,
    count_occurrences,
    dataset_extension_counts,
    enumerate_occurrences,
    extension_counts,
    one_node_extensions,
    prefix_stats,
)
from .trees import (
    Leaf,
    RegressionTree,
    Split,
    Stump,
    StumpScanner,
    fit_stump,
    fit_tree,
)
from .tudata import (
    DatasetSummary,
    LoadError,
    dataset_summary,
    load_dataset,
    write_dataset,
)

__version__ = "0.1.0"

__all__ = [
    "AnchorConfig",
    "BoostConfig",
    "BoostModel",
    "CVPlan",
    "CVReport",
    "ConfigError",
    "CountMatrix",
    "Dataset",
    "DatasetSummary",
    "FeatureCache",
    "FoldResult",
    "Graph",
    "GridSpec",
    "ImportanceRow",
    "IterationRecord",
    "LabelledPath",
    "Leaf",
    "LearningCurve",
    "LoadError",
    "ModelError",
    "PrefixStats",
    "PreparedData",
    "RegressionTree",
    "ScoreRecord",
    "Split",
    "Stage",
    "Stump",
    "StumpScanner",
    "accuracy",
    "anchor_nodes",
    "anchor_sets",
    "averaged_edge_attributes",
    "averaged_node_attributes",
    "build_count_matrix",
    "count_occurrences",
    "dataset_extension_counts",
    "dataset_summary",
    "detect_categorical_columns",
    "edge_attributes",
    "enumerate_occurrences",
    "extended_feature_row",
    "extension_counts",
    "f1_macro",
    "feature_row_length",
    "feature_row_names",
    "fit_stump",
    "fit_tree",
    "fold_assignments",
    "importance",
    "init_intercept",
    "learning_curve",
    "load_dataset",
    "load_model",
    "logistic_loss",
    "make_folds",
    "mean_training_loss",
    "neighbors",
    "one_node_extensions",
    "predict",
    "predict_prepared",
    "prefix_stats",
    "prefixes",
    "prepare",
    "pseudo_residuals",
    "rare_label_filter",
    "regression_metrics",
    "resolve_allowed_labels",
    "run_cv",
    "save_model",
    "select_anchor_attribute",
    "sigmoid",
    "train",
    "train_prepared",
    "validate_graph",
    "with_anchor_attribute",
    "write_dataset",
]
