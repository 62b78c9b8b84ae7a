"""Shapley attributions, global rankings, and latent-space probes."""

from .global_exp import (
    TOP_FEATURES,
    GlobalExplanation,
    global_explanation,
    shap_summary_doc,
    write_dependency_csv,
    write_shap_csv,
)
from .probe import (
    DEFAULT_OFFSETS,
    ProbeResult,
    perturbation_probe,
    read_probe_csv,
    region_reconstruct,
    write_probe_csv,
)
from .treeshap import ShapAttribution, TreeShapExplainer, tree_shap

__all__ = [
    "TOP_FEATURES",
    "GlobalExplanation",
    "global_explanation",
    "shap_summary_doc",
    "write_dependency_csv",
    "write_shap_csv",
    "DEFAULT_OFFSETS",
    "ProbeResult",
    "perturbation_probe",
    "read_probe_csv",
    "region_reconstruct",
    "write_probe_csv",
    "ShapAttribution",
    "TreeShapExplainer",
    "tree_shap",
]
