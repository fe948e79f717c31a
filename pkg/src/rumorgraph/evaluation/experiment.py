"""Cross-validated GCN vs identity-adjacency MLP runs and their artifacts."""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from ..features import FeatureMatrix, standardize
from ..gcn.model import GcnConfig, GcnModel, classes_from_output, predict_proba, save_checkpoint, train
from ..graph import NormalizedAdjacency
from .folds import FoldMasks, fold_seed, kfold
from .metrics import MetricsRow, RocCurve, auc_roc, classification_metrics, macro_average
from .svg import line_plot, write_svg

log = logging.getLogger(__name__)

MODELS = ("gcn", "mlp")


@dataclass(frozen=True)
class ExperimentConfig:
    gcn: GcnConfig = field(default_factory=GcnConfig)
    k: int = 5
    stratified: bool = True
    seed: int = 42
    models: tuple[str, ...] = MODELS


@dataclass
class ModelResult:
    folds: list[MetricsRow]
    macro: MetricsRow
    oof_scores: np.ndarray
    roc: RocCurve | None
    models: list[GcnModel] = field(default_factory=list, repr=False)


@dataclass
class ExperimentResult:
    results: dict[str, ModelResult]
    folds: list[FoldMasks]


def _as_array(X) -> np.ndarray:
    return X.values if isinstance(X, FeatureMatrix) else np.asarray(X, dtype=np.float64)


def _standardize(X: np.ndarray, rows: np.ndarray) -> np.ndarray:
    return standardize(FeatureMatrix(X, tuple(), tuple()), rows).values


def run_experiment(adj: NormalizedAdjacency, X, labels: Sequence[int], config: ExperimentConfig | None = None) -> ExperimentResult:
    """k-fold evaluation of each requested model.

    Per fold, features are standardised on the training rows, the network is
    trained on the training nodes with the whole graph propagated, and the
    held-out nodes are scored. Both models start from the same per-fold seed.
    """
    config = config or ExperimentConfig()
    unknown = set(config.models) - set(MODELS)
    if unknown:
        raise ValueError(f"unknown model(s) {sorted(unknown)}")
    X = _as_array(X)
    y = np.asarray(labels, dtype=np.int64)
    if adj.n != X.shape[0] or y.size != X.shape[0]:
        raise ValueError(f"adjacency ({adj.n}), features ({X.shape[0]}) and labels ({y.size}) disagree")
    folds = kfold(y, config.k, config.stratified, config.seed)
    identity = NormalizedAdjacency.identity(X.shape[0])

    results = {}
    for name in config.models:
        a = adj if name == "gcn" else identity
        rows, models = [], []
        oof = np.full(y.size, np.nan)
        for f, fold in enumerate(folds):
            Xf = _standardize(X, fold.train_idx)
            cfg = replace(config.gcn, seed=fold_seed(config.seed, f))
            model = GcnModel.initialize(X.shape[1], cfg)
            train(model, a, Xf, y, fold.train_idx)
            H2 = predict_proba(model, a, Xf)
            test = fold.test_idx
            scores = H2[test, 1]
            oof[test] = scores
            yt = y[test]
            auc = auc_roc(scores, yt)[0] if 0 < yt.sum() < yt.size else math.nan
            rows.append(classification_metrics(classes_from_output(H2[test]), yt, auc))
            models.append(model)
            log.info("%s fold %d: accuracy %.3f auc %.3f", name, f + 1, rows[-1].accuracy, auc)
        roc = auc_roc(oof, y)[1] if 0 < y.sum() < y.size else None
        results[name] = ModelResult(rows, macro_average(rows), oof, roc, models)
    return ExperimentResult(results, folds)


METRICS_COLUMNS = ["model", "fold", "accuracy", "precision", "recall", "f1", "auc", "micro_precision", "micro_recall", "micro_f1"]


def _fmt(v: float) -> str:
    return "nan" if math.isnan(v) else f"{v:.6f}"


def write_metrics_csv(result: ExperimentResult, path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(METRICS_COLUMNS)
        for name, res in result.results.items():
            for i, row in enumerate(res.folds, start=1):
                w.writerow([name, i] + [_fmt(v) for v in row.as_dict().values()])
            w.writerow([name, "macro"] + [_fmt(v) for v in res.macro.as_dict().values()])
    return path


def read_metrics_csv(path: str | Path) -> list[dict]:
    with Path(path).open(encoding="utf-8", newline="") as f:
        return list(csv.DictReader(f))


def write_roc_csv(curve: RocCurve, path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["fpr", "tpr", "threshold"])
        thresholds = np.concatenate([[np.inf], curve.thresholds])
        for x, y_, t in zip(curve.fpr, curve.tpr, thresholds):
            w.writerow([f"{x:.6f}", f"{y_:.6f}", "inf" if np.isinf(t) else f"{t:.6f}"])
    return path


def write_artifacts(result: ExperimentResult, out_dir: str | Path, checkpoints: bool = True) -> list[Path]:
    """metrics.csv, roc_<model>.csv, per-fold checkpoints and the two SVG plots."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = [write_metrics_csv(result, out / "metrics.csv")]
    for name, res in result.results.items():
        if res.roc is not None:
            written.append(write_roc_csv(res.roc, out / f"roc_{name}.csv"))
        if checkpoints:
            ck = out / "checkpoints"
            ck.mkdir(exist_ok=True)
            for i, m in enumerate(res.models, start=1):
                written.append(save_checkpoint(m, ck / f"{name}_fold{i}.json"))
    written.extend(write_plots(result, out))
    return written


def write_plots(result: ExperimentResult, out: Path) -> list[Path]:
    written = []
    series = {}
    for name, res in result.results.items():
        xs = list(range(1, len(res.folds) + 1))
        series[f"{name} accuracy"] = (xs, [r.accuracy for r in res.folds])
        series[f"{name} f1"] = (xs, [r.f1 for r in res.folds])
    if series:
        written.append(write_svg(line_plot(series, "Per-fold metrics", "fold", "score"), out / "cv_metrics.svg"))
    rocs = {f"{n} (AUC {auc_from_curve(r.roc):.3f})": (r.roc.fpr, r.roc.tpr) for n, r in result.results.items() if r.roc is not None}
    if rocs:
        written.append(
            write_svg(line_plot(rocs, "ROC", "false positive rate", "true positive rate", (0.0, 1.0), diagonal=True), out / "roc.svg")
        )
    return written


def auc_from_curve(curve: RocCurve) -> float:
    return float(np.trapezoid(curve.tpr, curve.fpr))
