"""Feature relevance tests: chi-square, information gain and gain ratio.

Continuous columns are cut into quantile bins first. Information gain and
gain ratio have no closed-form null distribution, so their p-values come
from label permutations.
"""

from __future__ import annotations

import csv
import logging
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.special import gammaincc

log = logging.getLogger(__name__)

DEFAULT_BINS = 10
DEFAULT_PERMUTATIONS = 1000


def discretize(values: Sequence[float], bins: int = DEFAULT_BINS) -> np.ndarray:
    """Integer codes: the distinct values themselves when there are at most
    ``bins`` of them, quantile bins otherwise."""
    x = np.asarray(values, dtype=np.float64)
    uniq = np.unique(x)
    if uniq.size <= bins:
        return np.searchsorted(uniq, x)
    edges = np.unique(np.quantile(x, np.linspace(0, 1, bins + 1)[1:-1]))
    return np.searchsorted(edges, x, side="right")


def contingency(feature: Sequence[int], label: Sequence[int]) -> np.ndarray:
    """Counts table over the observed feature codes x label values."""
    f = np.asarray(feature)
    y = np.asarray(label)
    if f.shape != y.shape:
        raise ValueError("feature and label lengths differ")
    _, fi = np.unique(f, return_inverse=True)
    _, yi = np.unique(y, return_inverse=True)
    r, c = fi.max() + 1, yi.max() + 1
    return np.bincount(fi * c + yi, minlength=r * c).reshape(r, c).astype(np.float64)


def chi_square(feature: Sequence[int], label: Sequence[int]) -> tuple[float, int]:
    table = contingency(feature, label)
    r, c = table.shape
    if r < 2 or c < 2:
        return 0.0, 0
    expected = table.sum(axis=1, keepdims=True) * table.sum(axis=0, keepdims=True) / table.sum()
    stat = float(((table - expected) ** 2 / expected).sum())
    return stat, (r - 1) * (c - 1)


def chi2_sf(stat: float, dof: int) -> float:
    """Upper tail of the chi-square distribution via the regularised incomplete gamma."""
    if dof <= 0:
        return 1.0
    return float(gammaincc(dof / 2.0, stat / 2.0))


def chi_square_p(feature: Sequence[int], label: Sequence[int]) -> float:
    stat, dof = chi_square(feature, label)
    if dof == 0:
        warnings.warn("degenerate contingency table (one row or column); p set to 1", RuntimeWarning, stacklevel=2)
        return 1.0
    return chi2_sf(stat, dof)


def entropy(codes: Sequence[int]) -> float:
    """Shannon entropy in bits."""
    _, counts = np.unique(np.asarray(codes), return_counts=True)
    p = counts / counts.sum()
    return float(-(p * np.log2(p)).sum())


def _conditional_entropy(table: np.ndarray) -> float:
    n = table.sum()
    rows = table.sum(axis=1)
    h = 0.0
    for row, tot in zip(table, rows):
        p = row[row > 0] / tot
        h += tot / n * float(-(p * np.log2(p)).sum())
    return h


def info_gain(feature: Sequence[int], label: Sequence[int]) -> float:
    """H(label) - H(label | feature)."""
    table = contingency(feature, label)
    return max(0.0, float(entropy(label) - _conditional_entropy(table)))


def gain_ratio(feature: Sequence[int], label: Sequence[int]) -> float:
    hf = entropy(feature)
    if hf == 0.0:
        return 0.0
    return info_gain(feature, label) / hf


def permutation_p(statistic, feature, label, permutations: int = DEFAULT_PERMUTATIONS, seed: int = 0) -> tuple[float, float]:
    """(observed statistic, p) with p = (1 + #{permuted >= observed}) / (M + 1)."""
    f = np.asarray(feature)
    y = np.asarray(label)
    observed = statistic(f, y)
    rng = np.random.default_rng(seed)
    tol = 1e-12 * max(1.0, abs(observed))
    hits = sum(1 for _ in range(permutations) if statistic(f, rng.permutation(y)) >= observed - tol)
    return observed, (hits + 1) / (permutations + 1)


@dataclass(frozen=True)
class FeatureStat:
    scope: str
    feature_name: str
    chi_square: float
    chi_square_p: float
    info_gain: float
    info_gain_p: float
    gain_ratio: float
    gain_ratio_p: float


def feature_stats(
    columns: Mapping[str, Sequence[float]],
    label: Sequence[int],
    scope: str = "all",
    bins: int = DEFAULT_BINS,
    permutations: int = DEFAULT_PERMUTATIONS,
    seed: int = 0,
) -> list[FeatureStat]:
    out = []
    for k, (name, values) in enumerate(columns.items()):
        codes = discretize(values, bins)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            chi, _ = chi_square(codes, label)
            chi_p = chi_square_p(codes, label)
        if chi_p == 1.0 and chi == 0.0:
            log.warning("%s/%s: degenerate contingency table", scope, name)
        ig, ig_p = permutation_p(info_gain, codes, label, permutations, seed + 2 * k)
        gr, gr_p = permutation_p(gain_ratio, codes, label, permutations, seed + 2 * k + 1)
        out.append(FeatureStat(scope, name, chi, chi_p, ig, ig_p, gr, gr_p))
    return out


def feature_stats_table(
    groups: Mapping[str, tuple[Mapping[str, Sequence[float]], Sequence[int]]],
    bins: int = DEFAULT_BINS,
    permutations: int = DEFAULT_PERMUTATIONS,
    seed: int = 0,
) -> list[FeatureStat]:
    """Per-group rows, plus pooled rows over all groups when there is more than one."""
    rows: list[FeatureStat] = []
    for scope, (cols, y) in groups.items():
        rows.extend(feature_stats(cols, y, scope, bins, permutations, seed))
    if len(groups) > 1:
        names = list(next(iter(groups.values()))[0])
        pooled_cols = {n: np.concatenate([np.asarray(c[n], dtype=float) for c, _ in groups.values()]) for n in names}
        pooled_y = np.concatenate([np.asarray(y) for _, y in groups.values()])
        rows.extend(feature_stats(pooled_cols, pooled_y, "pooled", bins, permutations, seed))
    return rows


FEATURE_STATS_COLUMNS = [
    "scope",
    "feature",
    "chi_square",
    "chi_square_p",
    "info_gain",
    "info_gain_p",
    "gain_ratio",
    "gain_ratio_p",
]


def write_feature_stats(rows: Iterable[FeatureStat], path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(FEATURE_STATS_COLUMNS)
        for r in rows:
            w.writerow(
                [r.scope, r.feature_name]
                + [f"{v:.6g}" for v in (r.chi_square, r.chi_square_p, r.info_gain, r.info_gain_p, r.gain_ratio, r.gain_ratio_p)]
            )
    return path
