from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

from ..ingest import IncidentCorpus, Label, corpus_stats
from ..textprep import clean_and_tokenize
from .minhash import MinHashSignature, estimate_similarity, minhash_signature

log = logging.getLogger(__name__)

SIMILARITY_THRESHOLD = 0.85
SPREADER_CUTOFF = 0.5

ReplyKey = tuple[int, int]  # (record index, reply index)


def label_from_similarity(similarity: float, initiator_label: Label, threshold: float = SIMILARITY_THRESHOLD) -> Label:
    """A similar reply inherits the initiator's label, any other reply gets the opposite one."""
    return initiator_label if similarity >= threshold else initiator_label.opposite


def label_replies(
    corpus: IncidentCorpus,
    threshold: float = SIMILARITY_THRESHOLD,
    num_hashes: int = 256,
    shingle_size: int = 2,
    seed: int = 42,
    tokenize: Callable[[str], list[str]] = clean_and_tokenize,
) -> dict[ReplyKey, Label]:
    """Weak label for every reply, compared against its own thread's source tweet."""
    cache: dict[str, MinHashSignature] = {}

    def sig(text: str) -> MinHashSignature:
        s = cache.get(text)
        if s is None:
            s = cache[text] = minhash_signature(tokenize(text), num_hashes, shingle_size, seed)
        return s

    labels: dict[ReplyKey, Label] = {}
    for i, rec in enumerate(corpus.records):
        if not rec.replies:
            continue
        source = sig(rec.tweet_text)
        for j, rep in enumerate(rec.replies):
            sim = estimate_similarity(source, sig(rep.reply_text))
            labels[(i, j)] = label_from_similarity(sim, rec.rumor_label, threshold)
    return labels


def intensity_score(labels: Sequence[Label]) -> float:
    """Share of a user's tweets labelled rumor."""
    if not labels:
        raise ValueError("intensity score needs at least one labelled tweet")
    return sum(1 for lab in labels if lab is Label.RUMOR) / len(labels)


def binarize(score: float) -> int:
    if not 0.0 <= score <= 1.0:
        raise ValueError(f"intensity score {score} outside [0, 1]")
    return 0 if score < SPREADER_CUTOFF else 1


@dataclass
class UserProfile:
    user_id: str
    tweet_labels: list[Label]
    intensity_score: float
    spreader_class: int
    followers_count: int
    favorites_count: int
    verified: bool
    tweets: list[str] = field(default_factory=list, repr=False)

    def to_json(self) -> dict:
        return {
            "user_id": self.user_id,
            "score": self.intensity_score,
            "class": self.spreader_class,
            "followers": self.followers_count,
            "favorites": self.favorites_count,
            "verified": self.verified,
            "labels": [lab.value for lab in self.tweet_labels],
        }


@dataclass
class _Acc:
    labels: list[Label] = field(default_factory=list)
    tweets: list[str] = field(default_factory=list)
    followers: int = 0
    favorites: int = 0
    verified: bool = False

    def add(self, label: Label, text: str, followers: int, favorites: int, verified: bool) -> None:
        self.labels.append(label)
        self.tweets.append(text)
        self.followers = max(self.followers, followers)
        self.favorites = max(self.favorites, favorites)
        self.verified = verified  # latest record wins


def build_user_profiles(corpus: IncidentCorpus, reply_labels: Mapping[ReplyKey, Label]) -> list[UserProfile]:
    """One profile per distinct user (initiators and repliers), sorted by user id.

    Labels are the ground truth of tweets a user initiated plus the weak labels
    of their replies, in corpus order. Follower and favourite counts take the
    maximum seen; ``verified`` comes from the user's last record.
    """
    acc: dict[str, _Acc] = {}
    for i, rec in enumerate(corpus.records):
        acc.setdefault(rec.initiator_user_id, _Acc()).add(
            rec.rumor_label, rec.tweet_text, rec.followers_count, rec.favorites_count, rec.verified
        )
        for j, rep in enumerate(rec.replies):
            try:
                label = reply_labels[(i, j)]
            except KeyError:
                raise KeyError(f"no weak label for reply {j} of record {i}") from None
            acc.setdefault(rep.reply_user_id, _Acc()).add(
                label, rep.reply_text, rep.reply_followers_count, rep.reply_favorites_count, rep.reply_verified
            )

    profiles = []
    for uid in sorted(acc):
        a = acc[uid]
        score = intensity_score(a.labels)
        profiles.append(
            UserProfile(uid, a.labels, score, binarize(score), a.followers, a.favorites, a.verified, a.tweets)
        )
    n1 = sum(p.spreader_class for p in profiles)
    log.info("%s: %d users, %d possible spreaders, %d non-spreaders", corpus.incident_name, len(profiles), n1, len(profiles) - n1)
    return profiles


def class_counts(profiles: Iterable[UserProfile]) -> tuple[int, int]:
    """(non-spreaders, possible spreaders)."""
    n0 = n1 = 0
    for p in profiles:
        if p.spreader_class:
            n1 += 1
        else:
            n0 += 1
    return n0, n1


def write_profiles(profiles: Iterable[UserProfile], path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as f:
        for p in profiles:
            f.write(json.dumps(p.to_json(), sort_keys=True) + "\n")
    return path


def read_profiles(path: str | Path) -> list[UserProfile]:
    out = []
    with Path(path).open(encoding="utf-8") as f:
        for line in f:
            if not line.strip():
                continue
            d = json.loads(line)
            out.append(
                UserProfile(
                    d["user_id"],
                    [Label(v) for v in d["labels"]],
                    d["score"],
                    d["class"],
                    d["followers"],
                    d["favorites"],
                    d["verified"],
                )
            )
    return out


LABEL_REPORT_COLUMNS = [
    "incident",
    "rumor_tweets",
    "rumor_tweets_pct",
    "non_rumor_tweets",
    "non_rumor_tweets_pct",
    "rumor_spreaders",
    "rumor_spreaders_pct",
    "non_rumor_spreaders",
    "non_rumor_spreaders_pct",
]


def label_report_row(corpus: IncidentCorpus, profiles: Sequence[UserProfile]) -> dict:
    stats = corpus_stats(corpus)
    n0, n1 = class_counts(profiles)
    tweets = stats.tweets
    users = max(n0 + n1, 1)
    return {
        "incident": corpus.incident_name,
        "rumor_tweets": stats.rumor_tweets,
        "rumor_tweets_pct": round(100.0 * stats.rumor_tweets / tweets, 1),
        "non_rumor_tweets": stats.non_rumor_tweets,
        "non_rumor_tweets_pct": round(100.0 * stats.non_rumor_tweets / tweets, 1),
        "rumor_spreaders": n1,
        "rumor_spreaders_pct": round(100.0 * n1 / users, 1),
        "non_rumor_spreaders": n0,
        "non_rumor_spreaders_pct": round(100.0 * n0 / users, 1),
    }


def write_label_report(rows: Iterable[dict], path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as f:
        w = csv.DictWriter(f, fieldnames=LABEL_REPORT_COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    return path
