"""Node feature matrix: tweet embeddings, profile counts and reply-share importance."""

from __future__ import annotations

import csv
import hashlib
import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .ingest import IncidentCorpus

log = logging.getLogger(__name__)

EMBEDDING_DIM = 300
USER_COLUMNS = ("followers", "favorites", "verified", "user_imp")


class EmbeddingProvider:
    """Word vectors, either loaded from a word2vec text file or hash-seeded.

    The hash-random mode gives every word a deterministic standard-normal
    vector keyed by ``(seed, word)``, so it knows every word.
    """

    def __init__(self, dimension: int = EMBEDDING_DIM, vectors: Mapping[str, np.ndarray] | None = None, seed: int = 0):
        if dimension < 1:
            raise ValueError("dimension must be positive")
        self.dimension = dimension
        self.seed = seed
        self._vectors = None if vectors is None else dict(vectors)
        self._cache: dict[str, np.ndarray] = {}

    @property
    def mode(self) -> str:
        return "hash-random" if self._vectors is None else "file"

    @classmethod
    def hash_random(cls, dimension: int = EMBEDDING_DIM, seed: int = 0) -> "EmbeddingProvider":
        return cls(dimension, None, seed)

    @classmethod
    def from_file(cls, path: str | Path) -> "EmbeddingProvider":
        """Read ``word v1 ... vD`` lines; an optional ``<count> <dim>`` header is skipped."""
        vectors: dict[str, np.ndarray] = {}
        dim = None
        with Path(path).open(encoding="utf-8") as f:
            for lineno, line in enumerate(f, start=1):
                parts = line.rstrip("\n").split()
                if not parts:
                    continue
                if lineno == 1 and len(parts) == 2 and all(p.isdigit() for p in parts):
                    continue
                word, values = parts[0], parts[1:]
                if dim is None:
                    dim = len(values)
                if len(values) != dim:
                    raise ValueError(f"{path}:{lineno}: expected {dim} values, got {len(values)}")
                vectors[word] = np.array(values, dtype=np.float64)
        if dim is None:
            raise ValueError(f"{path}: no vectors")
        return cls(dim, vectors)

    def __contains__(self, word: str) -> bool:
        return self._vectors is None or word in self._vectors

    def vector(self, word: str) -> np.ndarray | None:
        if self._vectors is not None:
            return self._vectors.get(word)
        v = self._cache.get(word)
        if v is None:
            h = hashlib.blake2b(word.encode("utf-8"), digest_size=8, key=self.seed.to_bytes(8, "little")).digest()
            rng = np.random.default_rng(int.from_bytes(h, "little"))
            v = self._cache[word] = rng.standard_normal(self.dimension)
        return v


def embed_text(tokens: Sequence[str], provider: EmbeddingProvider) -> np.ndarray:
    """Mean vector of the known tokens; zeros when none are known."""
    vecs = [v for v in (provider.vector(t) for t in tokens) if v is not None]
    if not vecs:
        return np.zeros(provider.dimension)
    return np.mean(vecs, axis=0)


def embed_user(tweets: Sequence[Sequence[str]], provider: EmbeddingProvider) -> np.ndarray:
    """Mean of the per-tweet embeddings of one user's tokenised tweets."""
    if not tweets:
        raise ValueError("user has no tweets to embed")
    return np.mean([embed_text(t, provider) for t in tweets], axis=0)


def reply_counts(corpus: IncidentCorpus) -> dict[str, int]:
    """Replies received per user; self-replies do not count. Every user gets an entry."""
    counts: dict[str, int] = {}
    for rec in corpus.records:
        counts.setdefault(rec.initiator_user_id, 0)
        for rep in rec.replies:
            counts.setdefault(rep.reply_user_id, 0)
            if rep.reply_user_id != rec.initiator_user_id:
                counts[rec.initiator_user_id] += 1
    return counts


def user_importance(counts: Mapping[str, int]) -> dict[str, float]:
    total = sum(counts.values())
    if total <= 0:
        return {u: 0.0 for u in counts}
    return {u: c / total for u, c in counts.items()}


@dataclass(frozen=True)
class FeatureMatrix:
    values: np.ndarray
    user_ids: tuple[str, ...]
    column_names: tuple[str, ...]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.column_names.index(name)]


def assemble(profiles, embeddings: Mapping[str, np.ndarray], user_imp: Mapping[str, float]) -> FeatureMatrix:
    """Rows in sorted user-id order; columns ``emb_0..emb_{D-1}`` then the user columns."""
    ids = sorted(p.user_id for p in profiles)
    by_id = {p.user_id: p for p in profiles}
    missing_emb = [u for u in ids if u not in embeddings]
    missing_imp = [u for u in ids if u not in user_imp]
    if missing_emb or missing_imp:
        parts = []
        if missing_emb:
            parts.append(f"embeddings missing for {', '.join(missing_emb[:10])}")
        if missing_imp:
            parts.append(f"user_imp missing for {', '.join(missing_imp[:10])}")
        raise KeyError("; ".join(parts))
    dims = {len(embeddings[u]) for u in ids}
    if len(dims) != 1:
        raise ValueError(f"embedding lengths disagree: {sorted(dims)}")
    dim = dims.pop()
    values = np.empty((len(ids), dim + len(USER_COLUMNS)))
    for r, u in enumerate(ids):
        p = by_id[u]
        values[r, :dim] = embeddings[u]
        values[r, dim:] = (p.followers_count, p.favorites_count, float(p.verified), user_imp[u])
    names = tuple(f"emb_{i}" for i in range(dim)) + USER_COLUMNS
    return FeatureMatrix(values, tuple(ids), names)


def standardize(matrix: FeatureMatrix, fit_rows: Sequence[int] | np.ndarray | None = None) -> FeatureMatrix:
    """Column z-scores using statistics of ``fit_rows`` only (all rows if None).

    Columns with zero variance on the fit rows become all zeros.
    """
    X = matrix.values
    rows = np.arange(X.shape[0]) if fit_rows is None else np.asarray(fit_rows)
    if rows.size == 0:
        raise ValueError("standardize needs at least one fit row")
    fit = X[rows]
    mean = fit.mean(axis=0)
    std = fit.std(axis=0)
    scale = np.abs(mean) + 1.0
    flat = std <= 1e-12 * scale
    out = (X - mean) / np.where(flat, 1.0, std)
    out[:, flat] = 0.0
    return replace(matrix, values=out)


def user_texts(corpus: IncidentCorpus) -> dict[str, list[str]]:
    """Every text a user posted (source tweets and replies), in corpus order."""
    texts: dict[str, list[str]] = {}
    for rec in corpus.records:
        texts.setdefault(rec.initiator_user_id, []).append(rec.tweet_text)
        for rep in rec.replies:
            texts.setdefault(rep.reply_user_id, []).append(rep.reply_text)
    return texts


def build_features(corpus: IncidentCorpus, profiles, provider: EmbeddingProvider, tokenize) -> FeatureMatrix:
    """Feature rows for ``profiles``; texts are taken from the corpus so profiles
    read back from disk (which do not carry tweets) work too."""
    texts = user_texts(corpus)
    embeddings = {p.user_id: embed_user([tokenize(t) for t in texts.get(p.user_id, [])], provider) for p in profiles}
    return assemble(profiles, embeddings, user_importance(reply_counts(corpus)))


def write_features_csv(matrix: FeatureMatrix, path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(("user_id",) + matrix.column_names)
        for uid, row in zip(matrix.user_ids, matrix.values):
            w.writerow([uid] + [repr(float(v)) for v in row])
    return path


def read_features_csv(path: str | Path) -> FeatureMatrix:
    with Path(path).open(encoding="utf-8", newline="") as f:
        r = csv.reader(f)
        header = next(r)
        ids, rows = [], []
        for line in r:
            ids.append(line[0])
            rows.append([float(v) for v in line[1:]])
    values = np.array(rows, dtype=np.float64).reshape(len(ids), len(header) - 1)
    return FeatureMatrix(values, tuple(ids), tuple(header[1:]))


def user_feature_block(matrix: FeatureMatrix, names: Iterable[str] = USER_COLUMNS) -> np.ndarray:
    return np.column_stack([matrix.column(n) for n in names])
