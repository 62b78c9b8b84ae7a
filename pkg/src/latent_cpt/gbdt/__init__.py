"""Boosted-tree classifier: features, trees, training, evaluation."""

from .evaluation import METRIC_NAMES, ConfusionMatrix, confusion, metrics, metrics_report
from .features import (
    LATENT_FEATURE_NAMES,
    METER_FEATURE_NAMES,
    SITE_FEATURE_NAMES,
    VARIANTS,
    WINDOW_FEATURE_NAMES,
    assemble_features,
    build_feature_table,
    variant_feature_names,
)
from .trees import Tree, TreeEnsemble, load_ensemble, save_ensemble
from .training import GbdtConfig, train_gbdt

__all__ = [
    "METRIC_NAMES",
    "ConfusionMatrix",
    "confusion",
    "metrics",
    "metrics_report",
    "LATENT_FEATURE_NAMES",
    "METER_FEATURE_NAMES",
    "SITE_FEATURE_NAMES",
    "VARIANTS",
    "WINDOW_FEATURE_NAMES",
    "assemble_features",
    "build_feature_table",
    "variant_feature_names",
    "Tree",
    "TreeEnsemble",
    "load_ensemble",
    "save_ensemble",
    "GbdtConfig",
    "train_gbdt",
]
