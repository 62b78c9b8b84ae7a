"""Exact interventional Shapley attributions for tree ensembles.

For one explained row x, one background row z, and one leaf with weight w,
the coalition value v(S) gains w exactly when the hybrid input (x's values on
S, z's elsewhere) satisfies every edge on the leaf's path. Grouping the
path's edges by feature leaves each feature in one of four states:

  free  — x and z both satisfy every edge (never blocks),
  A     — only x satisfies (the leaf needs this feature IN the coalition),
  B     — only z satisfies (the leaf needs it OUT),
  dead  — neither satisfies (the leaf is unreachable for this pair).

With a = |A|, b = |B| and m total features, the Shapley sum over coalitions
collapses to a closed form that depends only on (a, b, m):

  W(a, b, m) = sum_{k=0}^{m-1-a-b} C(m-1-a-b, k) (a+k)! (m-a-k-1)! / m!

and each leaf contributes  +w * W(a-1, b, m)  to every A feature and
-w * W(a, b-1, m)  to every B feature. Summing over leaves, background rows
(averaged), and trees gives attributions that satisfy local accuracy exactly:
base_value + sum(values) = margin(x).

The implementation is fully vectorized: per tree it tabulates every leaf's
path once, evaluates edge satisfaction for all background rows up front, and
processes explained rows in chunks with batched matrix products.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

import numpy as np

from ..errors import DimensionMismatch, EmptyBackground
from ..gbdt.trees import Tree, TreeEnsemble


@dataclass(frozen=True)
class ShapAttribution:
    """Per-feature margin-space contributions for one row."""

    base_value: float
    values: np.ndarray
    feature_names: list[str]

    def total(self) -> float:
        return self.base_value + float(self.values.sum())


def _w_coefficient(a: int, b: int, m: int) -> Fraction:
    q = m - 1 - a - b
    fm = factorial(m)
    return sum(
        (Fraction(comb(q, k) * factorial(a + k) * factorial(m - a - k - 1), fm)
         for k in range(q + 1)),
        Fraction(0),
    )


def _w_tables(m: int, max_ab: int) -> tuple[np.ndarray, np.ndarray]:
    """Lookup tables indexed by (a, b) = constraint-set sizes of a live leaf.

    in_table[a, b]  = W(a-1, b, m)  (coefficient for each A feature; a >= 1)
    out_table[a, b] = W(a, b-1, m)  (coefficient for each B feature; b >= 1)
    """
    size = max_ab + 1
    in_table = np.zeros((size, size))
    out_table = np.zeros((size, size))
    for a in range(size):
        for b in range(size - a):
            if a >= 1:
                in_table[a, b] = float(_w_coefficient(a - 1, b, m))
            if b >= 1:
                out_table[a, b] = float(_w_coefficient(a, b - 1, m))
    return in_table, out_table


class _TreePaths:
    """Per-leaf path tables of one tree, padded to the longest path.

    For leaf l: path_feature[l, p], path_threshold[l, p], path_left[l, p]
    describe edge p of its root path (valid where path_valid). group[l, p]
    maps the edge to the leaf's unique-feature slot, and unique_feature[l, u]
    names that slot (-1 = unused).
    """

    def __init__(self, tree: Tree):
        paths: list[list[tuple[int, float, bool]]] = []
        weights: list[float] = []

        def walk(node: int, edges: list[tuple[int, float, bool]]) -> None:
            if tree.feature[node] < 0:
                paths.append(list(edges))
                weights.append(float(tree.weight[node]))
                return
            f, t = int(tree.feature[node]), float(tree.threshold[node])
            walk(int(tree.left[node]), edges + [(f, t, True)])
            walk(int(tree.right[node]), edges + [(f, t, False)])

        walk(0, [])
        n_leaves = len(paths)
        depth = max(1, max(len(p) for p in paths))
        self.weights = np.asarray(weights)
        self.path_feature = np.zeros((n_leaves, depth), dtype=np.int64)
        self.path_threshold = np.zeros((n_leaves, depth))
        self.path_left = np.zeros((n_leaves, depth), dtype=bool)
        self.path_valid = np.zeros((n_leaves, depth), dtype=bool)
        self.group = np.zeros((n_leaves, depth), dtype=np.int64)
        max_unique = max(
            1, max(len({f for f, _, _ in p}) for p in paths) if any(paths) else 1
        )
        self.unique_feature = np.full((n_leaves, max_unique), -1, dtype=np.int64)
        for l, path in enumerate(paths):
            slots: dict[int, int] = {}
            for p, (f, t, left) in enumerate(path):
                self.path_feature[l, p] = f
                self.path_threshold[l, p] = t
                self.path_left[l, p] = left
                self.path_valid[l, p] = True
                if f not in slots:
                    slots[f] = len(slots)
                    self.unique_feature[l, slots[f]] = f
                self.group[l, p] = slots[f]

    @property
    def n_leaves(self) -> int:
        return self.weights.shape[0]

    @property
    def max_unique(self) -> int:
        return self.unique_feature.shape[1]

    def satisfaction(self, rows: np.ndarray) -> np.ndarray:
        """(n, leaves, slots) bools: does the row satisfy every path edge of
        that unique feature? Padded slots/edges count as satisfied."""
        n = rows.shape[0]
        edge_ok = (
            rows[:, self.path_feature] < self.path_threshold[None, :, :]
        ) == self.path_left[None, :, :]
        edge_ok |= ~self.path_valid[None, :, :]
        sat = np.ones((n, self.n_leaves, self.max_unique), dtype=bool)
        rows_idx = np.arange(n)[:, None]
        leaf_idx = np.arange(self.n_leaves)[None, :]
        for p in range(self.path_feature.shape[1]):
            sat[rows_idx, leaf_idx, self.group[None, :, p]] &= edge_ok[:, :, p]
        return sat


class TreeShapExplainer:
    """Explains ensemble margins against a fixed background sample."""

    def __init__(self, ensemble: TreeEnsemble, background: np.ndarray):
        bg = np.atleast_2d(np.asarray(background, dtype=float))
        if bg.shape[0] == 0:
            raise EmptyBackground("background must contain at least one row")
        if bg.shape[1] != ensemble.n_features:
            raise DimensionMismatch(
                f"background has {bg.shape[1]} features, ensemble expects "
                f"{ensemble.n_features}"
            )
        self.ensemble = ensemble
        self.background = bg
        self.feature_names = list(ensemble.feature_names)
        self._paths = [_TreePaths(t) for t in ensemble.trees]
        self._bg_sat = [p.satisfaction(bg) for p in self._paths]
        m = ensemble.n_features
        max_ab = max((p.max_unique for p in self._paths), default=1)
        self._w_in, self._w_out = _w_tables(m, max_ab)
        self.base_value = float(np.mean(ensemble.predict_margin(bg)))

    def shap_values(self, rows: np.ndarray, chunk_size: int = 64) -> np.ndarray:
        """(n, m) attributions; row i explains margin(rows[i])."""
        x = np.atleast_2d(np.asarray(rows, dtype=float))
        m = self.ensemble.n_features
        if x.shape[1] != m:
            raise DimensionMismatch(f"rows have {x.shape[1]} features, expected {m}")
        n = x.shape[0]
        nb = self.background.shape[0]
        phi = np.zeros((n, m))
        shrink = self.ensemble.shrinkage

        for paths, bg_sat in zip(self._paths, self._bg_sat):
            # Background tensors are per tree, shared across chunks.
            z_sat = bg_sat.transpose(1, 0, 2).astype(float)        # (L, nb, U)
            z_uns = (~bg_sat).transpose(1, 0, 2).astype(float)     # (L, nb, U)
            z_sat_t = z_sat.transpose(0, 2, 1)                     # (L, U, nb)
            z_uns_t = z_uns.transpose(0, 2, 1)
            weights = shrink * paths.weights                       # (L,)
            feat = paths.unique_feature                            # (L, U)
            flat_feat = np.where(feat < 0, m, feat).ravel()        # pad -> dummy m

            for start in range(0, n, chunk_size):
                xc = x[start : start + chunk_size]
                c = xc.shape[0]
                x_b = paths.satisfaction(xc).transpose(1, 0, 2)    # (L, c, U) bool
                x_sat = x_b.astype(float)
                x_uns = (~x_b).astype(float)

                a_cnt = x_sat @ z_uns_t                            # (L, c, nb)
                b_cnt = x_uns @ z_sat_t
                dead = x_uns @ z_uns_t
                alive = dead == 0.0
                a_idx = a_cnt.astype(np.int64)
                b_idx = b_cnt.astype(np.int64)

                scale = np.where(alive, weights[:, None, None], 0.0)
                coef_in = self._w_in[a_idx, b_idx] * scale         # (L, c, nb)
                coef_out = self._w_out[a_idx, b_idx] * scale

                # Sum over background rows, then attach the x-side indicator.
                gain = np.matmul(coef_in, z_uns) * x_sat           # (L, c, U)
                loss = np.matmul(coef_out, z_sat) * x_uns
                delta = (gain - loss).transpose(1, 0, 2)           # (c, L, U)

                flat = (
                    np.arange(c)[:, None] * (m + 1) + flat_feat[None, :]
                ).ravel()
                acc = np.bincount(flat, weights=delta.reshape(c, -1).ravel(),
                                  minlength=c * (m + 1)).reshape(c, m + 1)
                phi[start : start + c] += acc[:, :m]

        return phi / nb

    def explain(self, row) -> ShapAttribution:
        values = self.shap_values(np.asarray(row, dtype=float)[None, :])[0]
        return ShapAttribution(self.base_value, values, list(self.feature_names))


def tree_shap(ensemble: TreeEnsemble, row, background) -> ShapAttribution:
    """One-shot convenience wrapper around TreeShapExplainer."""
    return TreeShapExplainer(ensemble, background).explain(row)
