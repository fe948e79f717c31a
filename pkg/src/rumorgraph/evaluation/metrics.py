"""Classification metrics and ROC analysis for the binary spreader task."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.stats import rankdata


@dataclass(frozen=True)
class MetricsRow:
    accuracy: float
    precision: float  # macro over the two classes
    recall: float
    f1: float  # harmonic mean of macro precision and macro recall
    auc_roc: float = float("nan")
    micro_precision: float = float("nan")
    micro_recall: float = float("nan")
    micro_f1: float = float("nan")

    def as_dict(self) -> dict[str, float]:
        return {
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "auc": self.auc_roc,
            "micro_precision": self.micro_precision,
            "micro_recall": self.micro_recall,
            "micro_f1": self.micro_f1,
        }


def _f1(p: float, r: float) -> float:
    return 2 * p * r / (p + r) if p + r > 0 else 0.0


def confusion(pred: Sequence[int], truth: Sequence[int]) -> tuple[int, int, int, int]:
    """(tp, fp, fn, tn) with class 1 as positive."""
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    tp = int(np.sum((pred == 1) & (truth == 1)))
    fp = int(np.sum((pred == 1) & (truth == 0)))
    fn = int(np.sum((pred == 0) & (truth == 1)))
    tn = int(np.sum((pred == 0) & (truth == 0)))
    return tp, fp, fn, tn


def classification_metrics(pred: Sequence[int], truth: Sequence[int], auc: float = float("nan")) -> MetricsRow:
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape:
        raise ValueError(f"length mismatch: {pred.size} predictions vs {truth.size} labels")
    if pred.size == 0:
        raise ValueError("no predictions")
    tp, fp, fn, tn = confusion(pred, truth)
    n = tp + fp + fn + tn
    # per class: positive = 1, then positive = 0
    p1 = tp / (tp + fp) if tp + fp else 0.0
    r1 = tp / (tp + fn) if tp + fn else 0.0
    p0 = tn / (tn + fn) if tn + fn else 0.0
    r0 = tn / (tn + fp) if tn + fp else 0.0
    precision = (p0 + p1) / 2
    recall = (r0 + r1) / 2
    acc = (tp + tn) / n
    return MetricsRow(acc, precision, recall, _f1(precision, recall), auc, acc, acc, acc)


@dataclass(frozen=True)
class RocCurve:
    fpr: np.ndarray
    tpr: np.ndarray
    thresholds: np.ndarray  # score at which each point (after the origin) is reached


def auc_roc(scores: Sequence[float], truth: Sequence[int]) -> tuple[float, RocCurve]:
    """Mann-Whitney AUC (ties count one half) and the threshold-sweep ROC curve."""
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(truth)
    if s.shape != y.shape:
        raise ValueError(f"length mismatch: {s.size} scores vs {y.size} labels")
    pos = y == 1
    n1 = int(pos.sum())
    n0 = y.size - n1
    if n1 == 0 or n0 == 0:
        raise ValueError("AUC needs both classes in the truth vector")
    ranks = rankdata(s)
    auc = (ranks[pos].sum() - n1 * (n1 + 1) / 2.0) / (n1 * n0)

    order = np.argsort(-s, kind="stable")
    s_sorted = s[order]
    tp_cum = np.cumsum(pos[order])
    fp_cum = np.cumsum(~pos[order])
    last_of_group = np.flatnonzero(np.r_[s_sorted[1:] != s_sorted[:-1], True])
    thresholds = s_sorted[last_of_group]
    tp = tp_cum[last_of_group]
    fp = fp_cum[last_of_group]
    fpr = np.concatenate([[0.0], fp / n0])
    tpr = np.concatenate([[0.0], tp / n1])
    return float(auc), RocCurve(fpr, tpr, thresholds)


def macro_average(rows: Sequence[MetricsRow]) -> MetricsRow:
    """Fold means; F1 is recomputed from the mean precision and recall."""
    d = [r.as_dict() for r in rows]
    mean = {k: float(np.mean([x[k] for x in d])) for k in d[0]}
    return MetricsRow(
        mean["accuracy"],
        mean["precision"],
        mean["recall"],
        _f1(mean["precision"], mean["recall"]),
        mean["auc"],
        mean["micro_precision"],
        mean["micro_recall"],
        mean["micro_f1"],
    )
