"""Feature assembly for the four model variants.

Every variant starts with the same five site attributes; variants B, C, D
append a profile-derived block:

    A  site attributes only                                  (5)
    B  + window std/median of both channels below the water  (9)
    C  + one-meter channel averages                          (25)
    D  + ten latent features per channel                     (25)
"""

import numpy as np

from ..data.profiles import RegularProfile, one_meter_averages, std_median_features
from ..data.records import SiteRecord
from ..errors import LengthMismatch, MissingInput

VARIANTS = ("A", "B", "C", "D")

SITE_FEATURE_NAMES = ("pga", "gwd", "l", "slope", "elevation")
WINDOW_FEATURE_NAMES = ("ic_std", "ic_median", "qc1ncs_std", "qc1ncs_median")
METER_FEATURE_NAMES = tuple(f"ic_avg{i}" for i in range(10)) + tuple(
    f"qc1ncs_avg{i}" for i in range(10)
)
LATENT_FEATURE_NAMES = tuple(f"I_c{i}" for i in range(10)) + tuple(
    f"q_c{i}" for i in range(10)
)


def variant_feature_names(variant: str) -> list[str]:
    if variant not in VARIANTS:
        raise LengthMismatch(f"variant must be one of {VARIANTS}, got {variant!r}")
    extra = {
        "A": (),
        "B": WINDOW_FEATURE_NAMES,
        "C": METER_FEATURE_NAMES,
        "D": LATENT_FEATURE_NAMES,
    }[variant]
    return list(SITE_FEATURE_NAMES + extra)


def assemble_features(
    variant: str,
    record: SiteRecord,
    profile: RegularProfile | None = None,
    latents: np.ndarray | None = None,
) -> tuple[np.ndarray, list[str]]:
    """One site's feature vector and the matching names.

    B and C need the site's regular profile; D needs its 20 latent values
    (ic block then qc1ncs block). Missing inputs raise MissingInput.
    """
    names = variant_feature_names(variant)
    site_block = [record.pga_g, record.gwd_m, record.l_m, record.slope_pct, record.elev_m]
    if variant == "A":
        extra = np.empty(0)
    elif variant in ("B", "C"):
        if profile is None:
            raise MissingInput(f"variant {variant} requires the site's regular profile")
        if variant == "B":
            extra = std_median_features(profile, record.gwd_m)
        else:
            extra = one_meter_averages(profile)
    else:
        if latents is None:
            raise MissingInput("variant D requires latent features from trained autoencoders")
        extra = np.asarray(latents, dtype=float)
        if extra.shape != (20,):
            raise LengthMismatch(f"expected 20 latent values, got shape {extra.shape}")
    return np.concatenate([site_block, extra]), names


def build_feature_table(
    variant: str,
    rows: list[tuple[RegularProfile, SiteRecord]],
    latents_by_site: dict[str, np.ndarray] | None = None,
) -> tuple[np.ndarray, np.ndarray, list[str], list[str]]:
    """Stack per-site features for a list of joined (profile, record) rows.

    Returns (X, y, feature_names, site_ids) in the input row order.
    """
    feats, labels, ids = [], [], []
    names = variant_feature_names(variant)
    for profile, record in rows:
        lat = None
        if variant == "D":
            if latents_by_site is None or record.site_id not in latents_by_site:
                raise MissingInput(f"no latent features for site {record.site_id!r}")
            lat = latents_by_site[record.site_id]
        vec, _ = assemble_features(variant, record, profile=profile, latents=lat)
        feats.append(vec)
        labels.append(record.label)
        ids.append(record.site_id)
    x = np.vstack(feats) if feats else np.empty((0, len(names)))
    return x, np.asarray(labels, dtype=int), names, ids
