"""Profile regularization, site records, dataset splits, and synthesis."""

from .profiles import (
    BIN_SIZE_M,
    BINS_PER_METER,
    MATRIX_COLS,
    MATRIX_ROWS,
    N_BINS,
    PROFILE_DEPTH_M,
    RawCptSamples,
    RegularProfile,
    bin_centers,
    depth_to_bin,
    flatten_matrix,
    one_meter_averages,
    regularize_profile,
    reshape_channel,
    std_median_features,
    window_bins,
)
from .records import JoinReport, SiteRecord, join_datasets
from .split import DatasetSplit, load_split, save_split, split_dataset
from .synth import generate_corpus, generate_site, label_score

__all__ = [
    "BIN_SIZE_M",
    "BINS_PER_METER",
    "MATRIX_COLS",
    "MATRIX_ROWS",
    "N_BINS",
    "PROFILE_DEPTH_M",
    "RawCptSamples",
    "RegularProfile",
    "bin_centers",
    "depth_to_bin",
    "flatten_matrix",
    "one_meter_averages",
    "regularize_profile",
    "reshape_channel",
    "std_median_features",
    "window_bins",
    "JoinReport",
    "SiteRecord",
    "join_datasets",
    "DatasetSplit",
    "load_split",
    "save_split",
    "split_dataset",
    "generate_corpus",
    "generate_site",
    "label_score",
]
