"""Synthetic layered-soil corpus with a known ground-truth label rule.

Each site is a stack of 2-5 constant-property layers plus depth-correlated
AR(1) noise, together with site attributes (shaking intensity, water depth,
channel distance, slope, elevation). The binary lateral-spreading label
follows a fixed deterministic rule in which the soil-behavior index over
1-3 m depth carries most of the signal, so models that can see profile shape
have a real advantage over site-attribute-only models.

Generation is exactly reproducible: site k of an (n_sites, seed) corpus is
derived from the k-th child of ``np.random.SeedSequence(seed)`` and nothing
else, so corpora are stable under slicing and independent of generation
order.
"""

import numpy as np

from . import synth_constants as C
from .profiles import BINS_PER_METER, N_BINS, RegularProfile, bin_centers, depth_to_bin
from .records import SiteRecord

__all__ = ["generate_site", "generate_corpus", "label_score"]


def _ar1_noise(rng: np.random.Generator, n: int) -> np.ndarray:
    """Stationary AR(1) sequence with unit marginal variance."""
    innovations = rng.standard_normal(n)
    out = np.empty(n)
    out[0] = innovations[0]
    scale = np.sqrt(1.0 - C.AR1_RHO**2)
    for t in range(1, n):
        out[t] = C.AR1_RHO * out[t - 1] + scale * innovations[t]
    return out


def _layer_profile(rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Piecewise-constant (ic, qc1ncs) signals on the 200-bin grid."""
    n_layers = int(rng.integers(C.MIN_LAYERS, C.MAX_LAYERS + 1))
    spare = 10.0 - C.MIN_LAYER_THICKNESS_M * n_layers
    thickness = C.MIN_LAYER_THICKNESS_M + spare * rng.dirichlet(np.ones(n_layers))
    ic_layers = rng.uniform(C.IC_LAYER_LOW, C.IC_LAYER_HIGH, n_layers)
    qc_layers = C.QC_LOGISTIC_OFFSET + C.QC_LOGISTIC_SCALE / (
        1.0 + np.exp(C.QC_LOGISTIC_RATE * (ic_layers - C.QC_LOGISTIC_CENTER))
    )
    qc_layers = np.clip(
        qc_layers + rng.normal(0.0, C.QC_LAYER_NOISE_STD, n_layers),
        C.QC_LAYER_LOW,
        C.QC_LAYER_HIGH,
    )

    boundaries = np.cumsum(thickness)[:-1]
    layer_of_bin = np.searchsorted(boundaries, bin_centers(), side="right")
    return ic_layers[layer_of_bin], qc_layers[layer_of_bin]


def label_score(ic: np.ndarray, pga: float, gwd: float, l: float) -> float:
    """Signed score of the ground-truth label rule (label = score > 0)."""
    top = depth_to_bin(C.LABEL_WINDOW_TOP_M)
    bottom = depth_to_bin(C.LABEL_WINDOW_BOTTOM_M)
    mean_ic = float(np.mean(ic[top:bottom]))
    return (
        C.W_IC * (C.IC_CENTER - mean_ic)
        + C.W_PGA * (pga - C.PGA_CENTER)
        + C.W_GWD * (C.GWD_CENTER - gwd)
        + C.W_L * np.log(C.L_CENTER / l)
    )


def generate_site(site_id: str, seed_seq: np.random.SeedSequence) -> tuple[RegularProfile, SiteRecord]:
    """Generate one site from its dedicated seed sequence."""
    rng = np.random.default_rng(seed_seq)

    ic_base, qc_base = _layer_profile(rng)
    ic = np.clip(
        ic_base + C.IC_NOISE_STD * _ar1_noise(rng, N_BINS), C.IC_CLIP_LOW, C.IC_CLIP_HIGH
    )
    qc = np.clip(
        qc_base + C.QC_NOISE_STD * _ar1_noise(rng, N_BINS), C.QC_CLIP_LOW, C.QC_CLIP_HIGH
    )

    pga = float(rng.uniform(C.PGA_LOW, C.PGA_HIGH))
    gwd = float(rng.uniform(C.GWD_LOW, C.GWD_HIGH))
    l = float(rng.uniform(C.L_LOW, C.L_HIGH))
    slope = float(rng.uniform(C.SLOPE_LOW, C.SLOPE_HIGH))
    elev = float(rng.uniform(C.ELEV_LOW, C.ELEV_HIGH))
    label = int(label_score(ic, pga, gwd, l) > 0.0)

    profile = RegularProfile(site_id, ic, qc)
    record = SiteRecord(site_id, pga, gwd, l, slope, elev, label)
    return profile, record


def generate_corpus(
    n_sites: int, seed: int
) -> tuple[list[RegularProfile], list[SiteRecord]]:
    """Generate a corpus of n_sites sites; ids are s0000, s0001, ..."""
    children = np.random.SeedSequence(seed).spawn(n_sites)
    profiles: list[RegularProfile] = []
    records: list[SiteRecord] = []
    width = max(4, len(str(max(n_sites - 1, 0))))
    for k, child in enumerate(children):
        profile, record = generate_site(f"s{k:0{width}d}", child)
        profiles.append(profile)
        records.append(record)
    return profiles, records
