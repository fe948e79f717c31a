from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class FoldMasks:
    train_idx: np.ndarray
    test_idx: np.ndarray


def kfold(labels: Sequence[int], k: int = 5, stratified: bool = True, seed: int = 0) -> list[FoldMasks]:
    """Shuffled k-fold split; stratified mode deals each class round-robin.

    Concatenating the shuffled per-class index lists and assigning position
    ``p`` to fold ``p % k`` keeps every fold within one sample of its
    proportional share, per class and overall.
    """
    y = np.asarray(labels)
    n = y.size
    if k < 2:
        raise ValueError("k must be at least 2")
    if n < k:
        raise ValueError(f"cannot split {n} samples into {k} folds")
    rng = np.random.default_rng(seed)
    if stratified:
        classes, counts = np.unique(y, return_counts=True)
        small = classes[counts < k]
        if small.size:
            raise ValueError(f"class(es) {small.tolist()} have fewer than k={k} members")
        order = np.concatenate([rng.permutation(np.flatnonzero(y == c)) for c in classes])
    else:
        order = rng.permutation(n)
    fold_of = np.empty(n, dtype=np.int64)
    fold_of[order] = np.arange(n) % k
    everything = np.arange(n)
    return [FoldMasks(everything[fold_of != f], everything[fold_of == f]) for f in range(k)]


def fold_seed(base_seed: int, fold_index: int) -> int:
    """Independent per-fold seed derived from (base_seed, fold_index)."""
    return int(np.random.SeedSequence([base_seed, fold_index]).generate_state(1, dtype=np.uint32)[0])
