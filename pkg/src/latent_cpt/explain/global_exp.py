"""Dataset-level explanation: importance ranking, beeswarm and dependency
exports."""

import csv
from dataclasses import dataclass

import numpy as np

from ..errors import UnknownFeature
from ..gbdt.trees import TreeEnsemble
from .treeshap import TreeShapExplainer

TOP_FEATURES = 15


@dataclass
class GlobalExplanation:
    """SHAP values and raw feature values for every dataset row."""

    feature_names: list[str]
    row_ids: list[str]
    shap: np.ndarray      # (n, m) margin-space attributions
    features: np.ndarray  # (n, m) raw feature values
    base_value: float

    def __post_init__(self):
        n, m = self.shap.shape
        assert self.features.shape == (n, m) and len(self.feature_names) == m
        assert len(self.row_ids) == n

    @property
    def mean_abs_shap(self) -> np.ndarray:
        return np.abs(self.shap).mean(axis=0)

    def ranking(self) -> list[tuple[str, float]]:
        """All features sorted by mean |SHAP| descending; ties keep the
        original feature order."""
        mean_abs = self.mean_abs_shap
        order = sorted(range(len(self.feature_names)), key=lambda j: (-mean_abs[j], j))
        return [(self.feature_names[j], float(mean_abs[j])) for j in order]

    def top_features(self, k: int = TOP_FEATURES) -> tuple[list[tuple[str, float]], float]:
        """(top-k of the ranking, summed mean |SHAP| of everything below)."""
        ranked = self.ranking()
        remainder = float(sum(v for _, v in ranked[k:]))
        return ranked[:k], remainder

    def _col(self, name: str) -> int:
        try:
            return self.feature_names.index(name)
        except ValueError:
            raise UnknownFeature(f"unknown feature {name!r}") from None

    def dependency_data(self, feature: str, color_feature: str):
        """Per-row (value of feature, SHAP of feature, value of color
        feature), in dataset order."""
        f = self._col(feature)
        g = self._col(color_feature)
        return self.features[:, f].copy(), self.shap[:, f].copy(), self.features[:, g].copy()


def global_explanation(
    ensemble: TreeEnsemble,
    rows: np.ndarray,
    row_ids: list[str],
    background: np.ndarray,
) -> GlobalExplanation:
    explainer = TreeShapExplainer(ensemble, background)
    x = np.atleast_2d(np.asarray(rows, dtype=float))
    return GlobalExplanation(
        feature_names=list(ensemble.feature_names),
        row_ids=list(row_ids),
        shap=explainer.shap_values(x),
        features=x.copy(),
        base_value=explainer.base_value,
    )


def write_shap_csv(path, explanation: GlobalExplanation, provenance=None) -> None:
    """Long-form beeswarm export: row_id,feature,feature_value,shap_value."""
    from ..data.io import comment_lines, fmt_float

    with open(path, "w", newline="") as fh:
        for line in comment_lines(provenance):
            fh.write(line + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["row_id", "feature", "feature_value", "shap_value"])
        for i, rid in enumerate(explanation.row_ids):
            for j, name in enumerate(explanation.feature_names):
                writer.writerow(
                    [rid, name, fmt_float(explanation.features[i, j]),
                     fmt_float(explanation.shap[i, j])]
                )


def shap_summary_doc(explanation: GlobalExplanation) -> dict:
    top, remainder = explanation.top_features()
    return {
        "base_value": explanation.base_value,
        "n_rows": len(explanation.row_ids),
        "ranking": [{"feature": f, "mean_abs_shap": v} for f, v in explanation.ranking()],
        "top_features": [{"feature": f, "mean_abs_shap": v} for f, v in top],
        "remainder_mean_abs_shap": remainder,
    }


def write_dependency_csv(path, explanation: GlobalExplanation, feature: str,
                         color_feature: str, provenance=None) -> None:
    from ..data.io import comment_lines, fmt_float

    x, y, color = explanation.dependency_data(feature, color_feature)
    with open(path, "w", newline="") as fh:
        for line in comment_lines(provenance):
            fh.write(line + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["row_id", feature, f"shap_{feature}", color_feature])
        for i, rid in enumerate(explanation.row_ids):
            writer.writerow([rid, fmt_float(x[i]), fmt_float(y[i]), fmt_float(color[i])])
