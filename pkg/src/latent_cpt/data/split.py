"""Deterministic 70:15:15 train/validation/test split."""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import DuplicateId, TooFewItems

TRAIN_PCT = 70
VAL_PCT = 15


@dataclass(frozen=True)
class DatasetSplit:
    """Disjoint site-id sets. train gets 70% (integer floor), validation the
    next 15% floor, test the remainder."""

    train: frozenset[str]
    val: frozenset[str]
    test: frozenset[str]
    seed: int

    def subset_of(self, site_id: str) -> str:
        if site_id in self.train:
            return "train"
        if site_id in self.val:
            return "val"
        if site_id in self.test:
            return "test"
        raise KeyError(f"site {site_id!r} not in split")


def split_dataset(site_ids, seed: int) -> DatasetSplit:
    """Shuffle sorted ids with a seeded generator and cut at 70%/85%.

    Sorting first makes the split depend only on the id set and seed, not on
    the caller's ordering. Sizes use integer arithmetic: n_train = 70n//100,
    n_val = 15n//100, test takes the rest. Requires at least one site per
    subset.
    """
    ids = sorted(site_ids)
    if len(set(ids)) != len(ids):
        raise DuplicateId("site ids for splitting must be unique")
    n = len(ids)
    n_train = (TRAIN_PCT * n) // 100
    n_val = (VAL_PCT * n) // 100
    if n_train < 1 or n_val < 1 or n - n_train - n_val < 1:
        raise TooFewItems(f"cannot split {n} sites into three non-empty subsets")
    order = np.random.default_rng(seed).permutation(n)
    shuffled = [ids[i] for i in order]
    return DatasetSplit(
        train=frozenset(shuffled[:n_train]),
        val=frozenset(shuffled[n_train : n_train + n_val]),
        test=frozenset(shuffled[n_train + n_val :]),
        seed=seed,
    )


def save_split(split: DatasetSplit, path, provenance: dict | None = None) -> None:
    doc = {
        "train": sorted(split.train),
        "val": sorted(split.val),
        "test": sorted(split.test),
        "seed": split.seed,
    }
    if provenance is not None:
        doc["provenance"] = provenance
    Path(path).write_text(json.dumps(doc, indent=1) + "\n")


def load_split(path) -> DatasetSplit:
    doc = json.loads(Path(path).read_text())
    split = DatasetSplit(
        train=frozenset(doc["train"]),
        val=frozenset(doc["val"]),
        test=frozenset(doc["test"]),
        seed=int(doc["seed"]),
    )
    total = len(split.train) + len(split.val) + len(split.test)
    if total != len(split.train | split.val | split.test):
        raise DuplicateId(f"split file {path} has overlapping subsets")
    return split
