"""Latent-space probes: region reconstruction and perturbation sweeps.

The perturbation probe asks what a single latent coordinate encodes: fix
coordinate k at a grid of offsets, bootstrap the other coordinates from their
empirical marginals in the latent table (the same draws at every offset, so
the comparison is paired), decode, and average. The difference between each
offset's mean profile and the offset-0 reference isolates coordinate k's
effect on the reconstruction.
"""

import csv
import io
from dataclasses import dataclass

import numpy as np

from ..autoencoder.model import AutoencoderModel
from ..data.profiles import BINS_PER_METER, bin_centers
from ..errors import IndexOutOfRange, TooFewItems

DEFAULT_OFFSETS = tuple(np.arange(-8, 9) * 0.5)  # -4 ... +4 step 0.5


def region_reconstruct(
    model: AutoencoderModel, latents: np.ndarray, k: int, lo: float, hi: float
) -> tuple[np.ndarray, int]:
    """Decode every latent vector whose k-th value lies in [lo, hi].

    Returns (profiles, count); an empty selection is a valid result with
    count 0 and a (0, output_dim) array.
    """
    z = np.atleast_2d(np.asarray(latents, dtype=float))
    if not 0 <= k < z.shape[1]:
        raise IndexOutOfRange(f"latent index {k} out of range [0, {z.shape[1]})")
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    mask = (z[:, k] >= lo) & (z[:, k] <= hi)
    count = int(mask.sum())
    if count == 0:
        return np.empty((0, model.input_dim)), 0
    return model.decode_batch(z[mask]), count


@dataclass(frozen=True)
class ProbeResult:
    """Mean decoded profiles per offset and their differences from the
    offset-0 reference."""

    latent_index: int
    offsets: tuple[float, ...]
    mean_profiles: np.ndarray   # (n_offsets, output_dim)
    delta_profiles: np.ndarray  # (n_offsets, output_dim)
    n_samples: int
    seed: int

    def peak_bin(self) -> int:
        """Depth bin where the probe moves the reconstruction the most
        (max over offsets of |delta|, argmax over bins)."""
        return int(np.argmax(np.abs(self.delta_profiles).max(axis=0)))

    def peak_meter(self) -> int:
        return self.peak_bin() // BINS_PER_METER


def perturbation_probe(
    model: AutoencoderModel,
    latents: np.ndarray,
    k: int,
    offsets=DEFAULT_OFFSETS,
    n_samples: int = 100,
    seed: int = 0,
) -> ProbeResult:
    """Paired bootstrap sweep of latent coordinate k over the offset grid."""
    z = np.atleast_2d(np.asarray(latents, dtype=float))
    dim = z.shape[1]
    if not 0 <= k < dim:
        raise IndexOutOfRange(f"latent index {k} out of range [0, {dim})")
    if n_samples < 1:
        raise TooFewItems(f"n_samples must be >= 1, got {n_samples}")
    offsets = tuple(float(v) for v in offsets)
    if 0.0 not in offsets:
        raise ValueError("offsets must include 0 (the reference point)")

    rng = np.random.default_rng(seed)
    sampled = np.empty((n_samples, dim))
    for j in range(dim):
        if j == k:
            continue
        sampled[:, j] = z[rng.integers(0, z.shape[0], n_samples), j]

    means = np.empty((len(offsets), model.input_dim))
    for i, offset in enumerate(offsets):
        batch = sampled.copy()
        batch[:, k] = offset
        means[i] = model.decode_batch(batch).mean(axis=0)

    reference = means[offsets.index(0.0)]
    return ProbeResult(
        latent_index=k,
        offsets=offsets,
        mean_profiles=means,
        delta_profiles=means - reference,
        n_samples=n_samples,
        seed=seed,
    )


def write_probe_csv(path, result: ProbeResult, provenance=None) -> None:
    """One row per offset x depth bin: offset,depth_m,delta_value."""
    from ..data.io import comment_lines, fmt_float

    centers = bin_centers()
    with open(path, "w", newline="") as fh:
        for line in comment_lines(provenance):
            fh.write(line + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["offset", "depth_m", "delta_value"])
        for i, offset in enumerate(result.offsets):
            for b in range(result.delta_profiles.shape[1]):
                writer.writerow(
                    [fmt_float(offset), fmt_float(centers[b]),
                     fmt_float(result.delta_profiles[i, b])]
                )


def read_probe_csv(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Returns (offsets, depths, deltas) with deltas shaped
    (n_offsets, n_bins)."""
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    rows = list(csv.reader(io.StringIO("".join(lines))))[1:]
    offsets = sorted({float(r[0]) for r in rows})
    depths = sorted({float(r[1]) for r in rows})
    deltas = np.empty((len(offsets), len(depths)))
    off_idx = {v: i for i, v in enumerate(offsets)}
    dep_idx = {v: i for i, v in enumerate(depths)}
    for r in rows:
        deltas[off_idx[float(r[0])], dep_idx[float(r[1])]] = float(r[2])
    return np.asarray(offsets), np.asarray(depths), deltas
