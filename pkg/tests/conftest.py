"""Shared fixtures. The expensive ones (frozen corpus, trained autoencoders)
are session-scoped so the acceptance tests and unit tests share one build."""

import numpy as np
import pytest

from latent_cpt.autoencoder import TrainConfig, train_autoencoder
from latent_cpt.data import generate_corpus, split_dataset

FROZEN_N_SITES = 2000
FROZEN_SEED = 42


@pytest.fixture(scope="session")
def frozen_corpus():
    """The reference corpus: 2000 sites, seed 42."""
    profiles, records = generate_corpus(FROZEN_N_SITES, FROZEN_SEED)
    return profiles, records


@pytest.fixture(scope="session")
def frozen_split(frozen_corpus):
    profiles, _ = frozen_corpus
    return split_dataset([p.site_id for p in profiles], seed=FROZEN_SEED)


@pytest.fixture(scope="session")
def channel_matrices(frozen_corpus, frozen_split):
    """{channel: {subset: (ids, matrix)}}, ids sorted within each subset."""
    profiles, _ = frozen_corpus
    by_id = {p.site_id: p for p in profiles}
    out = {}
    for channel in ("ic", "qc1ncs"):
        out[channel] = {}
        for subset in ("train", "val", "test"):
            ids = sorted(getattr(frozen_split, subset))
            out[channel][subset] = (
                ids, np.stack([by_id[s].channel(channel) for s in ids])
            )
    return out


@pytest.fixture(scope="session")
def trained_autoencoders(channel_matrices):
    """Both channels trained once on the frozen corpus with default config,
    seed 42. Returns {channel: (model, history)}."""
    out = {}
    for channel in ("ic", "qc1ncs"):
        _, train_x = channel_matrices[channel]["train"]
        _, val_x = channel_matrices[channel]["val"]
        out[channel] = train_autoencoder(
            train_x, val_x, channel, TrainConfig(seed=FROZEN_SEED)
        )
    return out


@pytest.fixture(scope="session")
def latent_lookup(frozen_corpus, trained_autoencoders):
    """site_id -> 20 latent values (ic block then qc1ncs block) for every
    site of the frozen corpus."""
    profiles, _ = frozen_corpus
    ids = [p.site_id for p in profiles]
    ic_x = np.stack([p.ic for p in profiles])
    qc_x = np.stack([p.qc1ncs for p in profiles])
    lat_ic = trained_autoencoders["ic"][0].encode_batch(ic_x)
    lat_qc = trained_autoencoders["qc1ncs"][0].encode_batch(qc_x)
    both = np.hstack([lat_ic, lat_qc])
    return {site_id: both[i] for i, site_id in enumerate(ids)}


@pytest.fixture(scope="session")
def joined_rows(frozen_corpus):
    """(profile, record) pairs ordered by site id."""
    profiles, records = frozen_corpus
    rec_by_id = {r.site_id: r for r in records}
    return [(p, rec_by_id[p.site_id]) for p in profiles]
