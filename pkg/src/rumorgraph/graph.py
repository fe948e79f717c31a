"""User-user reply graph and its symmetrically normalised adjacency."""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.stats import rankdata

from .ingest import IncidentCorpus


@dataclass(frozen=True)
class ReplyGraph:
    node_ids: tuple[str, ...]
    edges: Mapping[tuple[int, int], int]  # i < j -> number of reply interactions

    @property
    def n(self) -> int:
        return len(self.node_ids)

    def index(self) -> dict[str, int]:
        return {u: i for i, u in enumerate(self.node_ids)}

    def adjacency(self, use_weights: bool = True) -> sp.csr_matrix:
        """Symmetric N x N adjacency without self-loops."""
        n = self.n
        if not self.edges:
            return sp.csr_matrix((n, n))
        ij = np.array(list(self.edges.keys()), dtype=np.int64)
        w = np.array(list(self.edges.values()), dtype=np.float64)
        if not use_weights:
            w = np.ones_like(w)
        rows = np.concatenate([ij[:, 0], ij[:, 1]])
        cols = np.concatenate([ij[:, 1], ij[:, 0]])
        return sp.csr_matrix((np.concatenate([w, w]), (rows, cols)), shape=(n, n))


def graph_from_pairs(node_ids: Iterable[str], pairs: Iterable[tuple[str, str]]) -> ReplyGraph:
    """Undirected weighted graph counting each (a, b) pair once per occurrence.

    Nodes are sorted; self pairs are ignored.
    """
    nodes = tuple(sorted(set(node_ids)))
    idx = {u: i for i, u in enumerate(nodes)}
    weights: Counter = Counter()
    for a, b in pairs:
        if a == b:
            continue
        i, j = idx[a], idx[b]
        weights[(min(i, j), max(i, j))] += 1
    return ReplyGraph(nodes, dict(sorted(weights.items())))


def build_graph(corpus: IncidentCorpus) -> ReplyGraph:
    users = set()
    pairs = []
    for rec in corpus.records:
        users.add(rec.initiator_user_id)
        for rep in rec.replies:
            users.add(rep.reply_user_id)
            pairs.append((rec.initiator_user_id, rep.reply_user_id))
    return graph_from_pairs(users, pairs)


@dataclass(frozen=True)
class NormalizedAdjacency:
    """D^-1/2 (A + I) D^-1/2 in CSR form."""

    matrix: sp.csr_matrix

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def to_dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def coo(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        m = self.matrix.tocoo()
        return m.row, m.col, m.data

    @classmethod
    def identity(cls, n: int) -> "NormalizedAdjacency":
        return cls(sp.identity(n, format="csr", dtype=np.float64))


def normalize_adjacency(adj: sp.spmatrix | np.ndarray) -> NormalizedAdjacency:
    a = sp.csr_matrix(adj, dtype=np.float64)
    n = a.shape[0]
    if n < 1 or a.shape != (n, n):
        raise ValueError(f"adjacency must be square and non-empty, got {a.shape}")
    a_tilde = (a + sp.identity(n, format="csr")).tocoo()
    deg = np.asarray(a_tilde.sum(axis=1)).ravel()
    inv_sqrt = 1.0 / np.sqrt(deg)
    vals = a_tilde.data * inv_sqrt[a_tilde.row] * inv_sqrt[a_tilde.col]
    m = sp.csr_matrix((vals, (a_tilde.row, a_tilde.col)), shape=(n, n))
    m.sort_indices()
    return NormalizedAdjacency(m)


def normalize(graph: ReplyGraph, use_weights: bool = True) -> NormalizedAdjacency:
    """Unit self-loops are added whatever the edge weights."""
    return normalize_adjacency(graph.adjacency(use_weights))


def degree_vector(graph: ReplyGraph) -> dict[str, int]:
    """Unweighted neighbour count per user."""
    deg = [0] * graph.n
    for i, j in graph.edges:
        deg[i] += 1
        deg[j] += 1
    return dict(zip(graph.node_ids, deg))


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    """Rank correlation with average ranks for ties; 0 when either side is constant."""
    rx = rankdata(x)
    ry = rankdata(y)
    rx = rx - rx.mean()
    ry = ry - ry.mean()
    den = np.sqrt((rx @ rx) * (ry @ ry))
    if den == 0:
        return 0.0
    return float(np.clip((rx @ ry) / den, -1.0, 1.0))


def degree_vs_score_report(graph: ReplyGraph, scores: Mapping[str, float], top_k: int = 10) -> dict:
    deg = degree_vector(graph)
    missing = [u for u in graph.node_ids if u not in scores]
    if missing:
        raise KeyError(f"no intensity score for {', '.join(missing[:10])}")
    ids = list(graph.node_ids)
    d = [deg[u] for u in ids]
    s = [scores[u] for u in ids]
    order = sorted(range(len(ids)), key=lambda i: (-d[i], ids[i]))[:top_k]
    return {
        "spearman": spearman(d, s),
        "top": [{"user_id": ids[i], "degree": d[i], "score": s[i]} for i in order],
    }


def write_edges_csv(graph: ReplyGraph, path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["src", "dst", "weight"])
        for (i, j), wt in graph.edges.items():
            w.writerow([graph.node_ids[i], graph.node_ids[j], wt])
    return path


def read_edges_csv(path: str | Path, node_ids: Iterable[str]) -> ReplyGraph:
    nodes = tuple(sorted(set(node_ids)))
    idx = {u: i for i, u in enumerate(nodes)}
    edges = {}
    with Path(path).open(encoding="utf-8", newline="") as f:
        for row in csv.DictReader(f):
            i, j = idx[row["src"]], idx[row["dst"]]
            edges[(min(i, j), max(i, j))] = int(row["weight"])
    return ReplyGraph(nodes, dict(sorted(edges.items())))


def write_adjacency_coo(adj: NormalizedAdjacency, path: str | Path) -> Path:
    path = Path(path)
    rows, cols, vals = adj.coo()
    with path.open("w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["row", "col", "value"])
        for r, c, v in zip(rows, cols, vals):
            w.writerow([int(r), int(c), repr(float(v))])
    return path
