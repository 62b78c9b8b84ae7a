"""Regression trees and boosted ensembles: structure, inference, JSON IO.

Trees use flat parallel arrays for fast vectorized prediction; the JSON form
is a conventional nested node object. Leaf weights are stored raw (margin
units before shrinkage); the ensemble applies shrinkage at prediction time.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import DimensionMismatch, LengthMismatch

ENSEMBLE_FORMAT_VERSION = "1"
_NO_CHILD = -1


@dataclass
class Tree:
    """One regression tree over feature vectors.

    feature[i] >= 0 marks an internal node (threshold/left/right valid);
    feature[i] == -1 marks a leaf (weight valid). Routing: x[feature] <
    threshold goes left. cover is the training hessian mass at each node.
    default_left is kept for format compatibility; inputs are complete, so it
    is never consulted.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    weight: np.ndarray
    cover: np.ndarray
    default_left: np.ndarray

    @property
    def n_nodes(self) -> int:
        return self.feature.shape[0]

    @property
    def n_leaves(self) -> int:
        return int(np.sum(self.feature == _NO_CHILD))

    def leaf_indices(self, x: np.ndarray) -> np.ndarray:
        """Node index of the leaf each row lands in."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        node = np.zeros(x.shape[0], dtype=np.int64)
        while True:
            active = np.nonzero(self.feature[node] >= 0)[0]
            if active.size == 0:
                return node
            at = node[active]
            go_left = x[active, self.feature[at]] < self.threshold[at]
            node[active] = np.where(go_left, self.left[at], self.right[at])

    def predict(self, x: np.ndarray) -> np.ndarray:
        """Raw leaf weight per row (no shrinkage)."""
        return self.weight[self.leaf_indices(x)]

    def to_doc(self) -> dict:
        def node_doc(i: int) -> dict:
            if self.feature[i] == _NO_CHILD:
                return {"weight": float(self.weight[i]), "cover": float(self.cover[i])}
            return {
                "feature": int(self.feature[i]),
                "threshold": float(self.threshold[i]),
                "left": node_doc(int(self.left[i])),
                "right": node_doc(int(self.right[i])),
                "cover": float(self.cover[i]),
                "default_left": bool(self.default_left[i]),
            }

        return node_doc(0)

    @classmethod
    def from_doc(cls, doc: dict) -> "Tree":
        feature, threshold, left, right, weight, cover, default_left = (
            [], [], [], [], [], [], []
        )

        def add(node: dict) -> int:
            i = len(feature)
            for arr in (feature, threshold, left, right, weight, cover, default_left):
                arr.append(0)
            cover[i] = float(node["cover"])
            if "weight" in node:
                feature[i] = _NO_CHILD
                threshold[i] = np.nan
                left[i] = right[i] = _NO_CHILD
                weight[i] = float(node["weight"])
                default_left[i] = True
            else:
                feature[i] = int(node["feature"])
                threshold[i] = float(node["threshold"])
                weight[i] = np.nan
                default_left[i] = bool(node.get("default_left", True))
                left[i] = add(node["left"])
                right[i] = add(node["right"])
            return i

        add(doc)
        return cls(
            feature=np.asarray(feature, dtype=np.int64),
            threshold=np.asarray(threshold, dtype=float),
            left=np.asarray(left, dtype=np.int64),
            right=np.asarray(right, dtype=np.int64),
            weight=np.asarray(weight, dtype=float),
            cover=np.asarray(cover, dtype=float),
            default_left=np.asarray(default_left, dtype=bool),
        )


@dataclass
class TreeEnsemble:
    """Boosted-tree binary classifier in margin space.

    margin(x) = base_score + shrinkage * sum of raw leaf weights; probability
    through the logistic link; label at the 0.5 threshold (margin >= 0).
    """

    base_score: float
    shrinkage: float
    feature_names: list[str]
    trees: list[Tree] = field(default_factory=list)

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    def _check(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[1] != self.n_features:
            raise DimensionMismatch(
                f"expected {self.n_features} features, got {x.shape[1]}"
            )
        return x

    def predict_margin(self, x: np.ndarray) -> np.ndarray:
        x = self._check(x)
        margin = np.full(x.shape[0], self.base_score, dtype=float)
        for tree in self.trees:
            margin += self.shrinkage * tree.predict(x)
        return margin

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        # expit without scipy: stable two-sided form
        m = self.predict_margin(x)
        out = np.empty_like(m)
        pos = m >= 0
        out[pos] = 1.0 / (1.0 + np.exp(-m[pos]))
        e = np.exp(m[~pos])
        out[~pos] = e / (1.0 + e)
        return out

    def predict_label(self, x: np.ndarray) -> np.ndarray:
        return (self.predict_margin(x) >= 0.0).astype(int)

    def truncated(self, n_trees: int) -> "TreeEnsemble":
        if not 0 <= n_trees <= len(self.trees):
            raise LengthMismatch(f"cannot keep {n_trees} of {len(self.trees)} trees")
        return TreeEnsemble(
            self.base_score, self.shrinkage, list(self.feature_names),
            self.trees[:n_trees],
        )


def save_ensemble(ensemble: TreeEnsemble, path, provenance: dict | None = None) -> None:
    doc = {
        "format_version": ENSEMBLE_FORMAT_VERSION,
        "base_score": float(ensemble.base_score),
        "shrinkage": float(ensemble.shrinkage),
        "feature_names": list(ensemble.feature_names),
        "trees": [t.to_doc() for t in ensemble.trees],
    }
    if provenance is not None:
        doc["provenance"] = provenance
    Path(path).write_text(json.dumps(doc) + "\n")


def load_ensemble(path) -> TreeEnsemble:
    doc = json.loads(Path(path).read_text())
    if doc.get("format_version") != ENSEMBLE_FORMAT_VERSION:
        raise LengthMismatch(
            f"{path}: unsupported ensemble format {doc.get('format_version')!r}"
        )
    return TreeEnsemble(
        base_score=float(doc["base_score"]),
        shrinkage=float(doc["shrinkage"]),
        feature_names=list(doc["feature_names"]),
        trees=[Tree.from_doc(d) for d in doc["trees"]],
    )
