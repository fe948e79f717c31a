"""Command-line driver: one sub-command per pipeline stage plus ``run-all``.

Stages communicate only through files in the output directory, so each can
be rerun on its own. A stage whose inputs are missing exits with status 1 and
names the command that produces them.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .config import OUT_ENV, PipelineConfig, load_config, with_overrides, write_config
from .evaluation import (
    ExperimentConfig,
    feature_stats_table,
    read_metrics_csv,
    run_experiment,
    write_artifacts,
    write_feature_stats,
)
from .features import USER_COLUMNS, EmbeddingProvider, FeatureMatrix, build_features, standardize
from .gcn import GcnModel, save_checkpoint, train, write_loss_trace
from .graph import ReplyGraph, build_graph, degree_vs_score_report, normalize, read_edges_csv, write_edges_csv
from .ingest import CorpusError, IncidentCorpus, corpus_stats, load_jsonl, load_pheme_incident, write_jsonl
from .synth import SynthSpec, generate, write_ground_truth
from .textprep import clean_and_tokenize
from .weaklabel import (
    build_user_profiles,
    class_counts,
    label_replies,
    label_report_row,
    read_profiles,
    sentiment_report,
    write_label_report,
    write_profiles,
)

log = logging.getLogger("rumorgraph")

ARTIFACT_VERSION = 1
SYNTH_CORPUS = "synth_corpus.jsonl"

# artifact -> command that writes it
PRODUCERS = {
    "corpus.jsonl": "ingest",
    "reply_labels.csv": "label",
    "profiles.jsonl": "label",
    "features.npy": "featurize",
    "features_index.json": "featurize",
    "edges.csv": "build-graph",
    "metrics.csv": "evaluate",
}


class StageError(RuntimeError):
    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


def _require(out: Path, stage: str, *names: str) -> None:
    for name in names:
        if not (out / name).is_file():
            raise StageError(stage, f"missing {out / name}; run `{PRODUCERS[name]}` first")


def _write_json(obj, path: Path) -> Path:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def _summary(out: Path, stage: str, **payload) -> Path:
    return _write_json({"stage": stage, "version": ARTIFACT_VERSION, **payload}, out / f"{stage}.json")


# --------------------------------------------------------------------------
# stages
# --------------------------------------------------------------------------


def _load_input(cfg: PipelineConfig, out: Path) -> IncidentCorpus:
    if cfg.input:
        path = Path(cfg.input)
    elif (out / SYNTH_CORPUS).is_file():
        return load_jsonl(out / SYNTH_CORPUS, cfg.incident or "synthetic")
    else:
        raise StageError("ingest", "no input given; pass --input or run `synth` first")
    if not path.exists():
        raise StageError("ingest", f"input {path} does not exist")
    if path.is_file():
        return load_jsonl(path, cfg.incident or None)
    if (path / "rumours").is_dir() or (path / "non-rumours").is_dir():
        return load_pheme_incident(path)
    if cfg.incident:
        return load_pheme_incident(path / cfg.incident)
    found = sorted(p.name for p in path.iterdir() if p.is_dir())
    raise StageError("ingest", f"{path} holds several incidents ({', '.join(found)}); choose one with --incident")


def stage_synth(cfg: PipelineConfig, out: Path) -> None:
    result = generate(SynthSpec(seed=cfg.seed))
    write_jsonl(result.corpus, out / SYNTH_CORPUS)
    write_ground_truth(result, out / "ground_truth.csv")
    _summary(out, "synth", seed=cfg.seed, tallies=result.tallies)
    log.info("synth: %d tweets, %d users", len(result.corpus.records), result.tallies["users"])


def stage_ingest(cfg: PipelineConfig, out: Path) -> IncidentCorpus:
    try:
        corpus = _load_input(cfg, out)
    except (CorpusError, OSError) as exc:
        raise StageError("ingest", str(exc)) from exc
    write_jsonl(corpus, out / "corpus.jsonl")
    stats = corpus_stats(corpus)
    _summary(
        out,
        "ingest",
        incident=corpus.incident_name,
        rumor_tweets=stats.rumor_tweets,
        non_rumor_tweets=stats.non_rumor_tweets,
        unique_users=stats.unique_users,
        replies=stats.replies,
        skipped=corpus.report.skipped,
        defaulted=corpus.report.defaulted,
        duplicates=corpus.report.duplicates,
    )
    log.info("ingest: %s, %d tweets (%d rumor), %d users", corpus.incident_name, stats.tweets, stats.rumor_tweets, stats.unique_users)
    return corpus


def _incident(out: Path) -> str | None:
    summary = out / "ingest.json"
    if summary.is_file():
        return json.loads(summary.read_text(encoding="utf-8"))["incident"]
    return None


def _corpus(out: Path, stage: str) -> IncidentCorpus:
    _require(out, stage, "corpus.jsonl")
    return load_jsonl(out / "corpus.jsonl", _incident(out))


def stage_label(cfg: PipelineConfig, out: Path) -> None:
    corpus = _corpus(out, "label")
    labels = label_replies(corpus, cfg.threshold, cfg.num_hashes, cfg.shingle_size, cfg.minhash_seed)
    with (out / "reply_labels.csv").open("w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["record", "reply", "label"])
        for (i, j), lab in sorted(labels.items()):
            w.writerow([i, j, lab.value])
    profiles = build_user_profiles(corpus, labels)
    write_profiles(profiles, out / "profiles.jsonl")
    write_label_report([label_report_row(corpus, profiles)], out / "label_report.csv")
    _write_json(sentiment_report(corpus), out / "sentiment_report.json")
    n0, n1 = class_counts(profiles)
    _summary(out, "label", users=len(profiles), spreaders=n1, non_spreaders=n0, threshold=cfg.threshold)


def _profiles(out: Path, stage: str):
    _require(out, stage, "profiles.jsonl")
    return read_profiles(out / "profiles.jsonl")


def stage_featurize(cfg: PipelineConfig, out: Path) -> None:
    corpus = _corpus(out, "featurize")
    profiles = _profiles(out, "featurize")
    if cfg.embedding_file:
        path = Path(cfg.embedding_file)
        if not path.is_file():
            raise StageError("featurize", f"embedding file {path} not found")
        provider = EmbeddingProvider.from_file(path)
    else:
        provider = EmbeddingProvider.hash_random(cfg.embedding_dim, cfg.seed)
    matrix = build_features(corpus, profiles, provider, clean_and_tokenize)
    np.save(out / "features.npy", matrix.values, allow_pickle=False)
    _write_json(
        {"user_ids": list(matrix.user_ids), "columns": list(matrix.column_names), "embedding": provider.mode},
        out / "features_index.json",
    )
    _summary(out, "featurize", rows=matrix.shape[0], columns=matrix.shape[1], embedding=provider.mode)


def _features(out: Path, stage: str) -> FeatureMatrix:
    _require(out, stage, "features.npy", "features_index.json")
    index = json.loads((out / "features_index.json").read_text(encoding="utf-8"))
    values = np.load(out / "features.npy", allow_pickle=False)
    return FeatureMatrix(values, tuple(index["user_ids"]), tuple(index["columns"]))


def stage_build_graph(cfg: PipelineConfig, out: Path) -> None:
    corpus = _corpus(out, "build-graph")
    profiles = _profiles(out, "build-graph")
    graph = build_graph(corpus)
    write_edges_csv(graph, out / "edges.csv")
    report = degree_vs_score_report(graph, {p.user_id: p.intensity_score for p in profiles})
    _summary(out, "build-graph", nodes=graph.n, edges=len(graph.edges), degree_vs_score=report)


def _graph(out: Path, stage: str, node_ids) -> ReplyGraph:
    _require(out, stage, "edges.csv")
    return read_edges_csv(out / "edges.csv", node_ids)


def _model_inputs(cfg: PipelineConfig, out: Path, stage: str):
    matrix = _features(out, stage)
    profiles = {p.user_id: p for p in _profiles(out, stage)}
    missing = [u for u in matrix.user_ids if u not in profiles]
    if missing:
        raise StageError(stage, f"features and profiles disagree ({len(missing)} users); rerun `featurize`")
    graph = _graph(out, stage, matrix.user_ids)
    if graph.node_ids != matrix.user_ids:
        raise StageError(stage, "graph nodes and feature rows disagree; rerun `build-graph`")
    adj = normalize(graph, cfg.weighted_adjacency)
    y = np.array([profiles[u].spreader_class for u in matrix.user_ids], dtype=np.int64)
    return matrix, adj, y


def stage_train(cfg: PipelineConfig, out: Path) -> None:
    """Fit each requested model on every labelled user."""
    matrix, adj, y = _model_inputs(cfg, out, "train")
    X = standardize(matrix).values
    ck = out / "checkpoints"
    ck.mkdir(exist_ok=True)
    final = {}
    for name in cfg.models:
        a = adj if name == "gcn" else type(adj).identity(adj.n)
        model = GcnModel.initialize(X.shape[1], replace(cfg.gcn, seed=cfg.seed))
        result = train(model, a, X, y, np.arange(y.size))
        save_checkpoint(model, ck / f"model_{name}.json")
        write_loss_trace(result.losses, out / f"loss_{name}.csv")
        final[name] = result.losses[-1] if result.losses else None
    _summary(out, "train", models=list(cfg.models), final_loss=final)


def stage_evaluate(cfg: PipelineConfig, out: Path) -> None:
    matrix, adj, y = _model_inputs(cfg, out, "evaluate")
    n0, n1 = int((y == 0).sum()), int((y == 1).sum())
    if min(n0, n1) < cfg.k:
        raise StageError("evaluate", f"class sizes {n0}/{n1} are too small for {cfg.k} folds")
    exp = ExperimentConfig(cfg.gcn, cfg.k, cfg.stratified, cfg.seed, cfg.models)
    result = run_experiment(adj, matrix.values, y, exp)
    write_artifacts(result, out)
    _summary(out, "evaluate", macro={n: r.macro.as_dict() for n, r in result.results.items()})


def stage_report(cfg: PipelineConfig, out: Path) -> None:
    matrix = _features(out, "report")
    profiles = {p.user_id: p for p in _profiles(out, "report")}
    _require(out, "report", "metrics.csv")
    incident = _incident(out) or "all"
    y = np.array([profiles[u].spreader_class for u in matrix.user_ids], dtype=np.int64)
    cols = {n: matrix.column(n) for n in USER_COLUMNS}
    stats = feature_stats_table({incident: (cols, y)}, cfg.bins, cfg.permutations, cfg.seed)
    write_feature_stats(stats, out / "feature_stats.csv")
    (out / "report.md").write_text(_report_markdown(out, incident, stats), encoding="utf-8")


def _fmt_table(rows: list[dict], columns: list[str]) -> list[str]:
    lines = ["| " + " | ".join(columns) + " |", "|" + "---|" * len(columns)]
    lines += ["| " + " | ".join(str(r[c]) for c in columns) + " |" for r in rows]
    return lines


def _report_markdown(out: Path, incident: str, stats) -> str:
    lines = [f"# Spreader detection report: {incident}", ""]
    if (out / "label_report.csv").is_file():
        with (out / "label_report.csv").open(encoding="utf-8", newline="") as f:
            rows = list(csv.DictReader(f))
        lines += ["## Tweets and spreaders", ""] + _fmt_table(rows, list(rows[0])) + [""]
    metrics = read_metrics_csv(out / "metrics.csv")
    lines += ["## Cross-validated metrics", ""]
    lines += _fmt_table(metrics, ["model", "fold", "accuracy", "precision", "recall", "f1", "auc", "micro_f1"]) + [""]
    lines += ["## User feature tests", ""]
    srows = [
        {
            "feature": s.feature_name,
            "chi2": f"{s.chi_square:.4g}",
            "chi2 p": f"{s.chi_square_p:.3g}",
            "IG": f"{s.info_gain:.4g}",
            "IG p": f"{s.info_gain_p:.3g}",
            "GR": f"{s.gain_ratio:.4g}",
            "GR p": f"{s.gain_ratio_p:.3g}",
        }
        for s in stats
    ]
    lines += _fmt_table(srows, list(srows[0])) + [""]
    if (out / "sentiment_report.json").is_file():
        sent = json.loads((out / "sentiment_report.json").read_text(encoding="utf-8"))
        lines += ["## Reply sentiment", ""]
        for cat, vals in sent.items():
            lines.append(f"- {cat}: " + ", ".join(f"{k} {v}" for k, v in sorted(vals.items())))
        if not sent:
            lines.append("- no polar replies")
        lines.append("")
    if (out / "build-graph.json").is_file():
        g = json.loads((out / "build-graph.json").read_text(encoding="utf-8"))
        lines += ["## Graph", "", f"- nodes {g['nodes']}, edges {g['edges']}",
                  f"- Spearman(degree, intensity score) = {g['degree_vs_score']['spearman']:.4f}", ""]
    return "\n".join(lines)


PIPELINE = ("ingest", "label", "featurize", "build-graph", "train", "evaluate", "report")
STAGES = {
    "synth": stage_synth,
    "ingest": stage_ingest,
    "label": stage_label,
    "featurize": stage_featurize,
    "build-graph": stage_build_graph,
    "train": stage_train,
    "evaluate": stage_evaluate,
    "report": stage_report,
}


# --------------------------------------------------------------------------
# argument handling
# --------------------------------------------------------------------------


def _bool(text: str) -> bool:
    v = text.lower()
    if v in ("true", "1", "yes"):
        return True
    if v in ("false", "0", "no"):
        return False
    raise argparse.ArgumentTypeError(f"expected true or false, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI config file ('default' for built-in settings)")
    common.add_argument("--input", help="PHEME incident directory, dataset root, or JSONL file")
    common.add_argument("--out", help=f"artifact directory (default: ${OUT_ENV} or ./artifacts)")
    common.add_argument("--seed", type=int)
    common.add_argument("--incident", help="incident subdirectory under --input")
    common.add_argument("--embedding-file", help="word2vec-format text vectors")
    common.add_argument("--threshold", type=float, help="MinHash similarity threshold")
    common.add_argument("--k", type=int, help="number of folds")
    common.add_argument("--epochs", type=int)
    common.add_argument("--ablation", choices=("gcn", "mlp", "both"))
    common.add_argument("--weighted-adjacency", type=_bool, metavar="{true,false}")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="rumorgraph", description="Graph-based rumor spreader detection pipeline.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "synth": "generate a synthetic corpus with planted spreader classes",
        "ingest": "parse the input corpus",
        "label": "weak-label replies and score users",
        "featurize": "build the user feature matrix",
        "build-graph": "build the user reply graph",
        "train": "fit the models on all users",
        "evaluate": "k-fold cross-validation of GCN and MLP",
        "report": "feature tests and a markdown summary",
        "run-all": "every stage from ingest to report",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text)
    return parser


def resolve_config(args: argparse.Namespace) -> PipelineConfig:
    cfg = load_config(args.config)
    return with_overrides(
        cfg,
        input=args.input,
        out=args.out,
        seed=args.seed,
        incident=args.incident,
        embedding_file=args.embedding_file,
        threshold=args.threshold,
        k=args.k,
        ablation=args.ablation,
        weighted_adjacency=args.weighted_adjacency,
        gcn_epochs=args.epochs,
    )


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"rumorgraph: [config] {exc}", file=sys.stderr)
        return 1
    out = cfg.out_dir()
    out.mkdir(parents=True, exist_ok=True)
    write_config(cfg, out / "config.ini")
    stages = PIPELINE if args.command == "run-all" else (args.command,)
    try:
        for name in stages:
            log.info("running %s", name)
            STAGES[name](cfg, out)
    except StageError as exc:
        print(f"rumorgraph: {exc}", file=sys.stderr)
        return 1
    except (CorpusError, ValueError, KeyError, OSError) as exc:
        print(f"rumorgraph: [{name}] {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
