"""Second-order gradient boosting on the logistic loss.

Each round fits one regression tree to the current gradient/hessian
statistics with exact greedy, gain-based splits and L2-regularized leaf
weights, then measures validation accuracy at the 0.5 threshold. Training
halts once accuracy has not improved for early_stopping_rounds consecutive
rounds (ties are not improvements) or the round budget is exhausted, and the
returned ensemble is truncated at the best-validation round.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import SingleClassTraining, TooFewItems
from .trees import Tree, TreeEnsemble


@dataclass(frozen=True)
class GbdtConfig:
    max_depth: int = 11
    early_stopping_rounds: int = 5
    max_estimators: int = 100
    learning_rate: float = 0.3
    l2_lambda: float = 1.0
    min_child_weight: float = 1.0
    seed: int = 0

    def validate(self) -> None:
        if self.max_depth < 1 or self.early_stopping_rounds < 1 or self.max_estimators < 1:
            raise TooFewItems("max_depth, early_stopping_rounds, max_estimators must be >= 1")
        if not (self.learning_rate > 0 and self.l2_lambda >= 0):
            raise TooFewItems("learning_rate must be > 0 and l2_lambda >= 0")


def _best_split(x: np.ndarray, g: np.ndarray, h: np.ndarray, lam: float,
                min_child_weight: float):
    """Exact greedy search over all (feature, midpoint) candidates.

    Returns (gain, feature, threshold) or None. Ties resolve to the lowest
    feature index, then the lowest threshold: features are scanned in index
    order and only strictly larger gains replace the incumbent, while
    np.argmax inside a feature takes the first (lowest-threshold) maximum.
    """
    total_g = g.sum()
    total_h = h.sum()
    parent_score = total_g * total_g / (total_h + lam)
    best = None
    best_gain = 0.0
    for f in range(x.shape[1]):
        order = np.argsort(x[:, f], kind="stable")
        xs = x[order, f]
        left_g = np.cumsum(g[order])[:-1]
        left_h = np.cumsum(h[order])[:-1]
        right_g = total_g - left_g
        right_h = total_h - left_h
        valid = (xs[1:] > xs[:-1]) & (left_h >= min_child_weight) & (right_h >= min_child_weight)
        if not valid.any():
            continue
        gain = 0.5 * (
            left_g**2 / (left_h + lam) + right_g**2 / (right_h + lam) - parent_score
        )
        gain[~valid] = -np.inf
        i = int(np.argmax(gain))
        if gain[i] > best_gain:
            best_gain = float(gain[i])
            best = (best_gain, f, float(0.5 * (xs[i] + xs[i + 1])))
    return best


def _grow_tree(x: np.ndarray, g: np.ndarray, h: np.ndarray, config: GbdtConfig) -> Tree:
    """Depth-limited recursive construction; returns the flat-array tree."""
    lam = config.l2_lambda

    def build(rows: np.ndarray, depth: int) -> dict:
        gr, hr = g[rows], h[rows]
        cover = float(hr.sum())
        leaf = {"weight": float(-gr.sum() / (hr.sum() + lam)), "cover": cover}
        if depth >= config.max_depth or rows.size < 2:
            return leaf
        found = _best_split(x[rows], gr, hr, lam, config.min_child_weight)
        if found is None:
            return leaf
        _, feature, threshold = found
        go_left = x[rows, feature] < threshold
        return {
            "feature": feature,
            "threshold": threshold,
            "left": build(rows[go_left], depth + 1),
            "right": build(rows[~go_left], depth + 1),
            "cover": cover,
            "default_left": True,
        }

    return Tree.from_doc(build(np.arange(x.shape[0]), 0))


def _sigmoid(m: np.ndarray) -> np.ndarray:
    out = np.empty_like(m)
    pos = m >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-m[pos]))
    e = np.exp(m[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def train_gbdt(
    x_train: np.ndarray,
    y_train: np.ndarray,
    x_val: np.ndarray,
    y_val: np.ndarray,
    feature_names: list[str],
    config: GbdtConfig | None = None,
) -> tuple[TreeEnsemble, list[float]]:
    """Boost until accuracy stalls; return (truncated ensemble, per-round
    validation accuracy for the rounds actually trained).

    Deterministic and invariant to row order: every split statistic is a sum
    over rows. base_score is the log-odds of the training base rate.
    """
    config = config or GbdtConfig()
    config.validate()
    x_train = np.asarray(x_train, dtype=float)
    x_val = np.asarray(x_val, dtype=float)
    y_train = np.asarray(y_train, dtype=float)
    y_val = np.asarray(y_val, dtype=float)
    if x_train.shape[0] < 1 or x_val.shape[0] < 1:
        raise TooFewItems("train and validation sets must be non-empty")

    base_rate = float(y_train.mean())
    if base_rate in (0.0, 1.0):
        raise SingleClassTraining(f"training labels are all {int(base_rate)}")
    base_score = float(np.log(base_rate / (1.0 - base_rate)))

    ensemble = TreeEnsemble(base_score, config.learning_rate, list(feature_names))
    margin_train = np.full(x_train.shape[0], base_score)
    margin_val = np.full(x_val.shape[0], base_score)

    history: list[float] = []
    best_acc = -np.inf
    best_round = -1
    for round_idx in range(config.max_estimators):
        p = _sigmoid(margin_train)
        tree = _grow_tree(x_train, p - y_train, p * (1.0 - p), config)
        ensemble.trees.append(tree)
        margin_train += config.learning_rate * tree.predict(x_train)
        margin_val += config.learning_rate * tree.predict(x_val)

        acc = float(np.mean((margin_val >= 0.0).astype(int) == y_val))
        history.append(acc)
        if acc > best_acc:
            best_acc = acc
            best_round = round_idx
        elif round_idx - best_round >= config.early_stopping_rounds:
            break

    return ensemble.truncated(best_round + 1), history
