"""Reconstruction-quality metrics comparing physical profiles."""

import numpy as np

from ..errors import LengthMismatch, NonPositiveValue


def _pair(reconstructed, original) -> tuple[np.ndarray, np.ndarray]:
    y = np.asarray(reconstructed, dtype=float)
    x = np.asarray(original, dtype=float)
    if y.shape != x.shape or y.ndim != 1 or y.size < 1:
        raise LengthMismatch(f"arrays must be equal-length 1-D, got {y.shape} vs {x.shape}")
    return y, x


def rmse(reconstructed, original) -> float:
    """Root of the mean squared pointwise difference."""
    y, x = _pair(reconstructed, original)
    return float(np.sqrt(np.mean((y - x) ** 2)))


def abs_log_difference(reconstructed, original) -> float:
    """Mean absolute natural-log ratio, mean_i |ln y_i - ln x_i|.

    Scale-free: sensitive to relative rather than absolute error, which suits
    resistance values spanning an order of magnitude. Requires strictly
    positive inputs.
    """
    y, x = _pair(reconstructed, original)
    if np.any(y <= 0) or np.any(x <= 0):
        raise NonPositiveValue("abs_log_difference requires strictly positive values")
    return float(np.mean(np.abs(np.log(y) - np.log(x))))
