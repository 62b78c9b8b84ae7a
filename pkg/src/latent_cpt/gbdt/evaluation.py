"""Confusion counts and classification metrics."""

from dataclasses import dataclass

import numpy as np

from ..errors import LengthMismatch, UndefinedMetric

METRIC_NAMES = ("accuracy", "balanced_accuracy", "precision", "recall", "f1")


@dataclass(frozen=True)
class ConfusionMatrix:
    tn: int
    fp: int
    fn: int
    tp: int

    @property
    def total(self) -> int:
        return self.tn + self.fp + self.fn + self.tp


def confusion(labels, predictions) -> ConfusionMatrix:
    y = np.asarray(labels, dtype=int)
    p = np.asarray(predictions, dtype=int)
    if y.shape != p.shape or y.ndim != 1:
        raise LengthMismatch(f"labels {y.shape} and predictions {p.shape} must match")
    return ConfusionMatrix(
        tn=int(np.sum((y == 0) & (p == 0))),
        fp=int(np.sum((y == 0) & (p == 1))),
        fn=int(np.sum((y == 1) & (p == 0))),
        tp=int(np.sum((y == 1) & (p == 1))),
    )


def metrics(cm: ConfusionMatrix) -> dict[str, float]:
    """The five headline metrics; raises UndefinedMetric on any zero
    denominator rather than silently reporting 0."""
    if cm.total == 0:
        raise UndefinedMetric("accuracy")
    accuracy = (cm.tp + cm.tn) / cm.total
    if cm.tp + cm.fn == 0:
        raise UndefinedMetric("recall")
    recall = cm.tp / (cm.tp + cm.fn)
    if cm.tn + cm.fp == 0:
        raise UndefinedMetric("balanced_accuracy")
    specificity = cm.tn / (cm.tn + cm.fp)
    if cm.tp + cm.fp == 0:
        raise UndefinedMetric("precision")
    precision = cm.tp / (cm.tp + cm.fp)
    if 2 * cm.tp + cm.fp + cm.fn == 0:
        raise UndefinedMetric("f1")
    f1 = 2 * cm.tp / (2 * cm.tp + cm.fp + cm.fn)
    return {
        "accuracy": accuracy,
        "balanced_accuracy": 0.5 * (recall + specificity),
        "precision": precision,
        "recall": recall,
        "f1": f1,
    }


def metrics_report(cm: ConfusionMatrix) -> dict[str, float | None]:
    """Like metrics(), but maps undefined entries to None (for JSON reports).

    Metrics are computed independently here, so one undefined metric does not
    mask the others.
    """
    out: dict[str, float | None] = dict.fromkeys(METRIC_NAMES)
    if cm.total > 0:
        out["accuracy"] = (cm.tp + cm.tn) / cm.total
    recall = cm.tp / (cm.tp + cm.fn) if cm.tp + cm.fn > 0 else None
    specificity = cm.tn / (cm.tn + cm.fp) if cm.tn + cm.fp > 0 else None
    out["recall"] = recall
    if recall is not None and specificity is not None:
        out["balanced_accuracy"] = 0.5 * (recall + specificity)
    if cm.tp + cm.fp > 0:
        out["precision"] = cm.tp / (cm.tp + cm.fp)
    if 2 * cm.tp + cm.fp + cm.fn > 0:
        out["f1"] = 2 * cm.tp / (2 * cm.tp + cm.fp + cm.fn)
    return out
