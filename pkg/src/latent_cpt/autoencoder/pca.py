"""Linear (principal-component) baseline for profile compression."""

from dataclasses import dataclass

import numpy as np

from ..errors import LengthMismatch, RankDeficient, TooFewItems


@dataclass(frozen=True)
class PcaBasis:
    """Centered top-k principal directions of the training profiles.

    components has shape (k, n_bins) with orthonormal rows; encode projects
    onto them, decode reconstructs from the projection.
    """

    mean: np.ndarray
    components: np.ndarray

    @property
    def k(self) -> int:
        return self.components.shape[0]


def pca_fit(profiles: np.ndarray, k: int = 10) -> PcaBasis:
    """Fit via SVD of the centered data matrix.

    Raises RankDeficient when the data do not span k directions (fewer than
    k meaningfully nonzero singular values).
    """
    x = np.asarray(profiles, dtype=float)
    if x.ndim != 2:
        raise LengthMismatch(f"expected (n, bins) matrix, got shape {x.shape}")
    n, p = x.shape
    if k < 1 or k > p:
        raise LengthMismatch(f"k must be in [1, {p}], got {k}")
    if n < k + 1:
        raise TooFewItems(f"need at least {k + 1} profiles to fit {k} components, got {n}")

    centered = x - x.mean(axis=0)
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    tol = max(n, p) * np.finfo(float).eps * (s[0] if s.size else 0.0)
    if np.sum(s > tol) < k:
        raise RankDeficient(f"data span only {int(np.sum(s > tol))} directions, need {k}")

    components = vt[:k]
    # Deterministic sign: largest-magnitude coefficient of each row positive.
    for row in components:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0
    return PcaBasis(mean=x.mean(axis=0), components=components)


def pca_encode(basis: PcaBasis, profiles: np.ndarray) -> np.ndarray:
    x = np.atleast_2d(np.asarray(profiles, dtype=float))
    if x.shape[1] != basis.mean.shape[0]:
        raise LengthMismatch(f"expected {basis.mean.shape[0]} bins, got {x.shape[1]}")
    return (x - basis.mean) @ basis.components.T


def pca_decode(basis: PcaBasis, scores: np.ndarray) -> np.ndarray:
    z = np.atleast_2d(np.asarray(scores, dtype=float))
    if z.shape[1] != basis.k:
        raise LengthMismatch(f"expected {basis.k} scores, got {z.shape[1]}")
    return z @ basis.components + basis.mean
