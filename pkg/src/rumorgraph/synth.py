"""Synthetic PHEME-shaped corpora and small graph datasets with known answers.

Corpus generation plants two user communities: would-be spreaders, who
initiate rumor tweets, and the rest, who initiate non-rumor tweets. With
probability ``homophily`` a reply comes from the initiator's own community and
copies the tweet (so it earns the initiator's label). Otherwise it comes
from the other community and is fresh text (the opposite label). The
generator records each reply's intended label, so ground-truth classes are
known exactly.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .graph import NormalizedAdjacency, ReplyGraph, graph_from_pairs, normalize
from .ingest import IncidentCorpus, Label, ReplyRecord, TweetRecord
from .weaklabel.labeling import binarize, intensity_score
from .weaklabel.minhash import shingles
from .weaklabel.sentiment import NEGATIONS, default_lexicon

_CONSONANTS = "bdfgklmnprstvz"
_VOWELS = "aeiou"
_COPY_JACCARD_FLOOR = 0.95


@dataclass(frozen=True)
class SynthSpec:
    n_initiators: int = 200
    replies_per_tweet_range: tuple[int, int] = (1, 6)
    rumor_fraction: float = 0.22
    homophily: float = 1.0
    vocab_size: int = 400
    seed: int = 7
    n_users: int | None = None  # default: 3 * n_initiators
    spreader_fraction: float | None = None  # default: rumor_fraction
    tweet_length_range: tuple[int, int] = (12, 18)
    copy_dropout: float = 0.1
    boundary_users: int = 0
    reply_sentiment: bool = False
    positive_rate: tuple[float, float] = (0.3, 0.8)  # replies to (rumor, non-rumor) tweets

    def __post_init__(self):
        for name in ("rumor_fraction", "homophily", "copy_dropout"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v}")
        if self.spreader_fraction is not None and not 0.0 < self.spreader_fraction < 1.0:
            raise ValueError("spreader_fraction must be in (0, 1)")
        if not all(0.0 <= p <= 1.0 for p in self.positive_rate):
            raise ValueError("positive_rate entries must be in [0, 1]")
        lo, hi = self.replies_per_tweet_range
        if lo < 0 or hi < lo:
            raise ValueError("replies_per_tweet_range must be a non-empty range")
        lo, hi = self.tweet_length_range
        if lo < 2 or hi < lo:
            raise ValueError("tweet_length_range must be a non-empty range with length >= 2")
        if self.n_initiators < 1 or self.vocab_size < 10 or self.boundary_users < 0:
            raise ValueError("n_initiators >= 1, vocab_size >= 10 and boundary_users >= 0 required")


@dataclass
class SynthCorpus:
    corpus: IncidentCorpus
    planted_labels: dict[str, list[Label]]
    tallies: dict[str, int] = field(default_factory=dict)

    @property
    def ground_truth(self) -> dict[str, int]:
        return {u: binarize(intensity_score(labs)) for u, labs in sorted(self.planted_labels.items())}


def _vocabulary(size: int, rng: np.random.Generator) -> list[str]:
    banned = set(default_lexicon()) | NEGATIONS
    words: list[str] = []
    seen: set[str] = set()
    while len(words) < size:
        syl = rng.integers(0, len(_CONSONANTS), 3), rng.integers(0, len(_VOWELS), 3)
        w = "".join(_CONSONANTS[c] + _VOWELS[v] for c, v in zip(*syl))
        if w not in seen and w not in banned:
            seen.add(w)
            words.append(w)
    return words


def _jaccard(a: list[str], b: list[str]) -> float:
    sa, sb = shingles(a, 2), shingles(b, 2)
    return len(sa & sb) / len(sa | sb)


def _near_copy(tokens: list[str], dropout: float, rng: np.random.Generator) -> list[str]:
    if dropout <= 0.0:
        return list(tokens)
    kept = [t for t in tokens if rng.random() >= dropout]
    if len(kept) < 2 or _jaccard(kept, tokens) < _COPY_JACCARD_FLOOR:
        return list(tokens)
    return kept


def generate(spec: SynthSpec) -> SynthCorpus:
    rng = np.random.default_rng(spec.seed)
    vocab = _vocabulary(spec.vocab_size, rng)
    lex = default_lexicon()
    positive = sorted(w for w, v in lex.items() if v > 0)
    negative = sorted(w for w, v in lex.items() if v < 0)

    n = spec.n_initiators
    n_rumor = int(round(spec.rumor_fraction * n))
    tweet_labels = np.array([1] * n_rumor + [0] * (n - n_rumor))
    rng.shuffle(tweet_labels)

    n_users = spec.n_users or 3 * n
    spreader_fraction = spec.spreader_fraction if spec.spreader_fraction is not None else spec.rumor_fraction
    n_spread = min(max(int(round(spreader_fraction * n_users)), 2), n_users - 2)
    perm = rng.permutation(n_users)
    user_ids = [f"u{i:06d}" for i in range(n_users)]
    community = {1: [user_ids[i] for i in sorted(perm[:n_spread])], 0: [user_ids[i] for i in sorted(perm[n_spread:])]}
    is_spreader = {u: 1 for u in community[1]} | {u: 0 for u in community[0]}
    meta = {}
    for u in user_ids:
        s = is_spreader[u]
        meta[u] = (
            int(rng.lognormal(6.0 + 1.0 * s, 1.0)),
            int(rng.lognormal(5.0 + 0.8 * s, 1.0)),
            bool(rng.random() < (0.12 if s else 0.04)),
        )

    planted: dict[str, list[Label]] = {}
    sentiment_tally = {(lab, pol): 0 for lab in Label for pol in ("positive", "negative")}
    records = []
    texts: list[list[str]] = []
    for i in range(n):
        r = np.random.default_rng([spec.seed, i])
        label = Label.RUMOR if tweet_labels[i] else Label.NON_RUMOR
        own = community[1 if label is Label.RUMOR else 0]
        other = community[0 if label is Label.RUMOR else 1]
        initiator = own[int(r.integers(len(own)))]
        length = int(r.integers(spec.tweet_length_range[0], spec.tweet_length_range[1] + 1))
        tokens = [vocab[k] for k in r.integers(0, len(vocab), size=length)]
        planted.setdefault(initiator, []).append(label)

        replies = []
        lo, hi = spec.replies_per_tweet_range
        for _ in range(int(r.integers(lo, hi + 1))):
            if r.random() < spec.homophily:
                pool = [u for u in own if u != initiator] or own
                replier = pool[int(r.integers(len(pool)))]
                reply_tokens = _near_copy(tokens, spec.copy_dropout, r)
                reply_label = label
            else:
                replier = other[int(r.integers(len(other)))]
                reply_tokens = [vocab[k] for k in r.integers(0, len(vocab), size=length)]
                while _jaccard(reply_tokens, tokens) > 0.5:
                    reply_tokens = [vocab[k] for k in r.integers(0, len(vocab), size=length)]
                reply_label = label.opposite
            if spec.reply_sentiment:
                rate = spec.positive_rate[0 if label is Label.RUMOR else 1]
                pol = "positive" if r.random() < rate else "negative"
                words = positive if pol == "positive" else negative
                reply_tokens = reply_tokens + [words[int(r.integers(len(words)))]]
                sentiment_tally[(label, pol)] += 1
            planted.setdefault(replier, []).append(reply_label)
            fol, fav, ver = meta[replier]
            replies.append(ReplyRecord(replier, " ".join(reply_tokens), fol, fav, ver))
        fol, fav, ver = meta[initiator]
        records.append([initiator, " ".join(tokens), fol, fav, ver, replies, label, f"t{i:06d}"])
        texts.append(tokens)

    # Boundary users: one verbatim reply to a rumor tweet and one to a non-rumor
    # tweet each, so their score is exactly 0.5.
    rumor_idx = [i for i in range(n) if tweet_labels[i]]
    plain_idx = [i for i in range(n) if not tweet_labels[i]]
    if spec.boundary_users and (not rumor_idx or not plain_idx):
        raise ValueError("boundary users need both rumor and non-rumor tweets")
    for b in range(spec.boundary_users):
        uid = f"b{b:06d}"
        for pool in (rumor_idx, plain_idx):
            i = pool[int(rng.integers(len(pool)))]
            rec = records[i]
            rec[5].append(ReplyRecord(uid, " ".join(texts[i]), 0, 0, False))
            planted.setdefault(uid, []).append(rec[6])

    corpus = IncidentCorpus(
        "synthetic",
        tuple(TweetRecord(a, t, fo, fa, v, tuple(reps), lab, tid) for a, t, fo, fa, v, reps, lab, tid in records),
    )
    n_replies = sum(len(rec.replies) for rec in corpus.records)
    gt = {u: binarize(intensity_score(labs)) for u, labs in planted.items()}
    tallies = {
        "rumor_tweets": n_rumor,
        "non_rumor_tweets": n - n_rumor,
        "replies": n_replies,
        "users": len(planted),
        "spreaders": sum(gt.values()),
    }
    for (lab, pol), c in sentiment_tally.items():
        tallies[f"{lab.value}_{pol}_replies"] = c
    return SynthCorpus(corpus, planted, tallies)


def write_ground_truth(result: SynthCorpus, path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["user_id", "score", "class"])
        for u, labs in sorted(result.planted_labels.items()):
            s = intensity_score(labs)
            w.writerow([u, repr(s), binarize(s)])
    return path


# --------------------------------------------------------------------------
# Graph datasets for the structure ablation
# --------------------------------------------------------------------------


@dataclass
class GraphDataset:
    graph: ReplyGraph
    X: np.ndarray
    y: np.ndarray

    def adjacency(self, use_weights: bool = True) -> NormalizedAdjacency:
        return normalize(self.graph, use_weights)


def _ids(n: int) -> list[str]:
    return [f"n{i:05d}" for i in range(n)]


def homophily_dataset(
    n: int = 600,
    seed: int = 0,
    n_features: int = 8,
    mean_degree_in: float = 10.0,
    mean_degree_out: float = 1.0,
    signal: float = 0.4,
) -> GraphDataset:
    """Two-block stochastic block model where a node's label is its neighbourhood majority.

    Features carry only a weak per-node hint of the block, so the label is
    recoverable from the neighbourhood but barely from the node alone.
    """
    rng = np.random.default_rng(seed)
    block = rng.permutation(np.arange(n) % 2)
    half = n / 2
    p_in = mean_degree_in / half
    p_out = mean_degree_out / half
    iu, ju = np.triu_indices(n, k=1)
    same = block[iu] == block[ju]
    keep = rng.random(iu.size) < np.where(same, p_in, p_out)
    ids = _ids(n)
    pairs = [(ids[i], ids[j]) for i, j in zip(iu[keep], ju[keep])]
    graph = graph_from_pairs(ids, pairs)

    votes = np.zeros((n, 2))
    for i, j in zip(iu[keep], ju[keep]):
        votes[i, block[j]] += 1
        votes[j, block[i]] += 1
    y = np.where(votes[:, 1] > votes[:, 0], 1, np.where(votes[:, 0] > votes[:, 1], 0, block))

    X = rng.standard_normal((n, n_features))
    X[:, 0] += signal * (2 * block - 1)
    return GraphDataset(graph, X, y.astype(np.int64))


def feature_only_dataset(n: int = 600, seed: int = 0, n_features: int = 8, k_neighbors: int = 10) -> GraphDataset:
    """Labels are a linear rule on the features; edges join feature-space nearest neighbours.

    The graph is a function of the features, so it adds no information the
    features do not already carry.
    """
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, n_features))
    w = np.zeros(n_features)
    w[:2] = (1.0, 0.5)
    y = (X @ w > 0).astype(np.int64)
    d2 = ((X[:, None, :] - X[None, :, :]) ** 2).sum(axis=2)
    np.fill_diagonal(d2, np.inf)
    nearest = np.argsort(d2, axis=1, kind="stable")[:, :k_neighbors]
    ids = _ids(n)
    pairs = {(min(i, j), max(i, j)) for i in range(n) for j in nearest[i]}
    graph = graph_from_pairs(ids, [(ids[i], ids[j]) for i, j in sorted(pairs)])
    return GraphDataset(graph, X, y)
