"""CPT profile types, depth regularization, and profile-derived features.

A site's raw cone record is a sequence of (depth, soil-behavior index,
normalized resistance) samples at an arbitrary rate (typically 1-2 cm).
Regularization averages them onto a fixed 200-bin grid of 5 cm bins covering
[0, 10) m, which every downstream stage assumes.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import EmptyBin, LengthMismatch, NonPositiveValue, WindowOutOfRange

N_BINS = 200
BINS_PER_METER = 20
BIN_SIZE_M = 0.05
PROFILE_DEPTH_M = 10.0
MATRIX_ROWS = 10
MATRIX_COLS = 20
WINDOW_M = 4.0
MIN_WINDOW_BINS = 20

# Bins are half-open [0.05k, 0.05(k+1)). The epsilon (in bin units) makes
# decimal boundary depths written as text, e.g. 0.35, land in the upper bin
# despite binary rounding; it shifts real depths by under 5e-11 m.
_BIN_EPS = 1e-9


@dataclass(frozen=True)
class RawCptSamples:
    """One site's raw cone record as parallel arrays.

    depths must be strictly increasing and non-negative; ic and qc1ncs must be
    strictly positive (log-based metrics require positivity). A site is
    admissible for the pipeline only if its record reaches 10 m.
    """

    site_id: str
    depths: np.ndarray
    ic: np.ndarray
    qc1ncs: np.ndarray

    def validate(self) -> None:
        d = np.asarray(self.depths, dtype=float)
        if d.ndim != 1 or d.shape != np.shape(self.ic) or d.shape != np.shape(self.qc1ncs):
            raise LengthMismatch(f"{self.site_id}: depths/ic/qc1ncs lengths differ")
        if d.size == 0:
            raise LengthMismatch(f"{self.site_id}: empty sample record")
        if np.any(d < 0):
            raise NonPositiveValue(f"{self.site_id}: negative depth")
        if np.any(np.diff(d) <= 0):
            raise NonPositiveValue(f"{self.site_id}: depths not strictly increasing")
        if np.any(np.asarray(self.ic) <= 0) or np.any(np.asarray(self.qc1ncs) <= 0):
            raise NonPositiveValue(f"{self.site_id}: non-positive ic or qc1ncs sample")


@dataclass(frozen=True)
class RegularProfile:
    """A site's ic and qc1ncs on the fixed 200-bin grid (bin k covers
    [0.05k, 0.05(k+1)) m)."""

    site_id: str
    ic: np.ndarray
    qc1ncs: np.ndarray

    def validate(self) -> None:
        for name, arr in (("ic", self.ic), ("qc1ncs", self.qc1ncs)):
            a = np.asarray(arr, dtype=float)
            if a.shape != (N_BINS,):
                raise LengthMismatch(f"{self.site_id}: {name} must have {N_BINS} bins")
            if not np.all(np.isfinite(a)) or np.any(a <= 0):
                raise NonPositiveValue(f"{self.site_id}: {name} must be finite and > 0")

    def channel(self, name: str) -> np.ndarray:
        if name == "ic":
            return self.ic
        if name == "qc1ncs":
            return self.qc1ncs
        raise KeyError(f"unknown channel {name!r}")


def depth_to_bin(depths) -> np.ndarray:
    """Map depths in meters to bin indices under the half-open convention."""
    return np.floor(np.asarray(depths, dtype=float) * BINS_PER_METER + _BIN_EPS).astype(int)


def bin_centers() -> np.ndarray:
    """Center depth in meters of each of the 200 bins."""
    return (np.arange(N_BINS) + 0.5) * BIN_SIZE_M


def regularize_profile(raw: RawCptSamples) -> RegularProfile:
    """Average raw samples over every 5 cm bin of the 10 m profile.

    Samples at or beyond 10 m are ignored. Raises NonPositiveValue if any
    sample value is <= 0 and EmptyBin(k) for the first bin inside [0, 10) m
    that received no sample.
    """
    depths = np.asarray(raw.depths, dtype=float)
    ic = np.asarray(raw.ic, dtype=float)
    qc = np.asarray(raw.qc1ncs, dtype=float)
    if np.any(ic <= 0) or np.any(qc <= 0):
        raise NonPositiveValue(f"{raw.site_id}: non-positive ic or qc1ncs sample")

    bins = depth_to_bin(depths)
    keep = (bins >= 0) & (bins < N_BINS)
    bins = bins[keep]
    counts = np.bincount(bins, minlength=N_BINS)
    if np.any(counts == 0):
        raise EmptyBin(int(np.argmin(counts > 0)))
    ic_mean = np.bincount(bins, weights=ic[keep], minlength=N_BINS) / counts
    qc_mean = np.bincount(bins, weights=qc[keep], minlength=N_BINS) / counts
    return RegularProfile(raw.site_id, ic_mean, qc_mean)


def reshape_channel(profile) -> np.ndarray:
    """Reshape a length-200 channel into the 10x20 matrix (row = meter,
    column = 5 cm bin within the meter). Lossless: see flatten_matrix."""
    arr = np.asarray(profile, dtype=float)
    if arr.shape != (N_BINS,):
        raise LengthMismatch(f"expected {N_BINS} values, got shape {arr.shape}")
    return arr.reshape(MATRIX_ROWS, MATRIX_COLS).copy()


def flatten_matrix(matrix) -> np.ndarray:
    """Inverse of reshape_channel."""
    arr = np.asarray(matrix, dtype=float)
    if arr.shape != (MATRIX_ROWS, MATRIX_COLS):
        raise LengthMismatch(f"expected ({MATRIX_ROWS}, {MATRIX_COLS}), got {arr.shape}")
    return arr.reshape(N_BINS).copy()


def window_bins(gwd: float) -> tuple[int, int]:
    """Bin range [start, stop) of the 4 m window below the water table.

    The window is clipped at the 10 m profile bottom; at least MIN_WINDOW_BINS
    bins must remain.
    """
    if gwd >= PROFILE_DEPTH_M:
        raise WindowOutOfRange(f"groundwater depth {gwd} m is at or below the profile bottom")
    start = max(int(depth_to_bin(gwd)), 0)
    stop = min(int(depth_to_bin(gwd + WINDOW_M)), N_BINS)
    if stop - start < MIN_WINDOW_BINS:
        raise WindowOutOfRange(
            f"only {stop - start} bins left below gwd={gwd} m (need {MIN_WINDOW_BINS})"
        )
    return start, stop


def std_median_features(profile: RegularProfile, gwd: float) -> np.ndarray:
    """[std(ic), median(ic), std(qc), median(qc)] over the 4 m window below
    the water table. Population standard deviation; even-length medians are
    the mean of the two central order statistics."""
    start, stop = window_bins(gwd)
    w_ic = profile.ic[start:stop]
    w_qc = profile.qc1ncs[start:stop]
    return np.array([w_ic.std(), np.median(w_ic), w_qc.std(), np.median(w_qc)])


def one_meter_averages(profile: RegularProfile) -> np.ndarray:
    """Ten per-meter ic means followed by ten per-meter qc1ncs means."""
    ic_m = np.asarray(profile.ic, dtype=float).reshape(MATRIX_ROWS, MATRIX_COLS).mean(axis=1)
    qc_m = np.asarray(profile.qc1ncs, dtype=float).reshape(MATRIX_ROWS, MATRIX_COLS).mean(axis=1)
    return np.concatenate([ic_m, qc_m])
