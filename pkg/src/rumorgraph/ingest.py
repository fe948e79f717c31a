"""Tweet-thread ingestion: PHEME directory trees and the JSONL fixture format."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Iterable

log = logging.getLogger(__name__)


class Label(str, Enum):
    RUMOR = "rumor"
    NON_RUMOR = "non-rumor"

    @property
    def opposite(self) -> "Label":
        return Label.NON_RUMOR if self is Label.RUMOR else Label.RUMOR

    @classmethod
    def parse(cls, value: Any) -> "Label":
        if isinstance(value, Label):
            return value
        if isinstance(value, bool) or isinstance(value, int):
            return cls.RUMOR if value else cls.NON_RUMOR
        if isinstance(value, str):
            key = value.strip().lower().replace("_", "-")
            if key in ("rumor", "rumour", "1", "true"):
                return cls.RUMOR
            if key in ("non-rumor", "non-rumour", "nonrumor", "nonrumour", "0", "false"):
                return cls.NON_RUMOR
        raise ValueError(f"unrecognised label {value!r}")


class CorpusError(Exception):
    """Fatal ingestion problem (missing path, nothing parsable)."""


class CorpusFormatError(CorpusError, ValueError):
    """A JSONL line does not match the record schema."""


@dataclass(frozen=True)
class ReplyRecord:
    reply_user_id: str
    reply_text: str
    reply_followers_count: int = 0
    reply_favorites_count: int = 0
    reply_verified: bool = False


@dataclass(frozen=True)
class TweetRecord:
    initiator_user_id: str
    tweet_text: str
    followers_count: int
    favorites_count: int
    verified: bool
    replies: tuple[ReplyRecord, ...]
    rumor_label: Label
    thread_id: str = ""

    def __post_init__(self):
        if not self.initiator_user_id:
            raise ValueError("initiator_user_id must be non-empty")


@dataclass
class LoadReport:
    skipped: list[str] = field(default_factory=list)
    defaulted: int = 0
    duplicates: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class IncidentCorpus:
    incident_name: str
    records: tuple[TweetRecord, ...]
    report: LoadReport = field(default_factory=LoadReport, compare=False, repr=False)

    def __post_init__(self):
        if not self.records:
            raise CorpusError(f"{self.incident_name}: corpus has no records")


@dataclass(frozen=True)
class CorpusStats:
    rumor_tweets: int
    non_rumor_tweets: int
    unique_users: int
    replies: int

    @property
    def tweets(self) -> int:
        return self.rumor_tweets + self.non_rumor_tweets


def corpus_stats(corpus: IncidentCorpus) -> CorpusStats:
    rumor = sum(1 for r in corpus.records if r.rumor_label is Label.RUMOR)
    users = set()
    replies = 0
    for rec in corpus.records:
        users.add(rec.initiator_user_id)
        for rep in rec.replies:
            users.add(rep.reply_user_id)
        replies += len(rec.replies)
    return CorpusStats(rumor, len(corpus.records) - rumor, len(users), replies)


# --------------------------------------------------------------------------
# PHEME directory layout
# --------------------------------------------------------------------------

_LABEL_DIRS = {"rumours": Label.RUMOR, "non-rumours": Label.NON_RUMOR}


def _count(user: dict, *keys: str, report: LoadReport) -> int:
    for k in keys:
        v = user.get(k)
        if isinstance(v, (int, float)) and not isinstance(v, bool) and v >= 0:
            return int(v)
    report.defaulted += 1
    return 0


def _tweet_fields(tweet: dict, report: LoadReport) -> tuple[str, str, int, int, bool]:
    user = tweet.get("user") or {}
    uid = user.get("id_str") or (str(user["id"]) if user.get("id") is not None else "")
    text = tweet.get("text") or tweet.get("full_text") or ""
    if not uid or not text:
        raise KeyError("user.id_str" if not uid else "text")
    followers = _count(user, "followers_count", report=report)
    favorites = _count(user, "favourites_count", "favorites_count", report=report)
    verified = user.get("verified")
    if not isinstance(verified, bool):
        report.defaulted += 1
        verified = False
    return str(uid), text, followers, favorites, verified


def _read_json(path: Path, report: LoadReport) -> dict | None:
    try:
        with path.open(encoding="utf-8") as f:
            return json.load(f)
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        log.warning("skipping malformed file %s: %s", path, exc)
        report.skipped.append(str(path))
        return None


def _parse_thread(thread_dir: Path, label: Label, report: LoadReport) -> TweetRecord | None:
    sources = sorted((thread_dir / "source-tweets").glob("*.json"))
    if not sources:
        log.warning("thread %s has no source tweet", thread_dir)
        report.skipped.append(str(thread_dir))
        return None
    source = _read_json(sources[0], report)
    if source is None:
        return None
    try:
        uid, text, followers, favorites, verified = _tweet_fields(source, report)
    except KeyError as exc:
        log.warning("thread %s: source tweet missing %s", thread_dir, exc)
        report.skipped.append(str(sources[0]))
        return None

    source_id = str(source.get("id_str", thread_dir.name))
    replies = []
    for path in sorted((thread_dir / "reactions").glob("*.json")):
        tweet = _read_json(path, report)
        if tweet is None or str(tweet.get("id_str", "")) == source_id:
            continue
        try:
            r_uid, r_text, r_fol, r_fav, r_ver = _tweet_fields(tweet, report)
        except KeyError as exc:
            log.warning("reaction %s missing %s", path, exc)
            report.skipped.append(str(path))
            continue
        replies.append(ReplyRecord(r_uid, r_text, r_fol, r_fav, r_ver))
    return TweetRecord(uid, text, followers, favorites, verified, tuple(replies), label, thread_dir.name)


def load_pheme_incident(path: str | Path) -> IncidentCorpus:
    """Load ``<incident>/{rumours,non-rumours}/<thread>/`` into a corpus.

    Threads are merged by sorted thread id; a thread id seen twice keeps the
    later one (non-rumours sort before rumours) and is logged.
    """
    root = Path(path)
    if not root.is_dir():
        raise CorpusError(f"incident directory not found: {root}")
    report = LoadReport()
    threads: list[tuple[str, str, Path, Label]] = []
    for sub, label in _LABEL_DIRS.items():
        d = root / sub
        if d.is_dir():
            threads.extend((p.name, sub, p, label) for p in d.iterdir() if p.is_dir())
    threads.sort()

    by_id: dict[str, TweetRecord] = {}
    for thread_id, _, thread_dir, label in threads:
        rec = _parse_thread(thread_dir, label, report)
        if rec is None:
            continue
        if thread_id in by_id:
            log.warning("duplicate thread id %s; keeping %s", thread_id, thread_dir)
            report.duplicates.append(thread_id)
        by_id[thread_id] = rec
    if not by_id:
        raise CorpusError(f"no parsable threads under {root}")
    records = tuple(by_id[k] for k in sorted(by_id))
    return IncidentCorpus(root.name, records, report)


# --------------------------------------------------------------------------
# JSONL fixture format
# --------------------------------------------------------------------------

_RECORD_KEYS = {
    "user_id": "initiator_user_id",
    "text": "tweet_text",
    "followers": "followers_count",
    "favorites": "favorites_count",
    "verified": "verified",
    "label": "rumor_label",
}
_REPLY_KEYS = {
    "user_id": "reply_user_id",
    "text": "reply_text",
    "followers": "reply_followers_count",
    "favorites": "reply_favorites_count",
    "verified": "reply_verified",
}


def _field(obj: dict, key: str, names: dict[str, str], kind: type, where: str):
    if key not in obj:
        raise CorpusFormatError(f"{where}: {names[key]} missing (key '{key}')")
    value = obj[key]
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int) or value < 0:
            raise CorpusFormatError(f"{where}: {names[key]} must be a non-negative integer")
    elif kind is bool:
        if not isinstance(value, bool):
            raise CorpusFormatError(f"{where}: {names[key]} must be a boolean")
    elif kind is str:
        if not isinstance(value, str) or (key == "user_id" and not value):
            raise CorpusFormatError(f"{where}: {names[key]} must be a non-empty string")
    return value


def _record_from_json(obj: Any, where: str) -> TweetRecord:
    if not isinstance(obj, dict):
        raise CorpusFormatError(f"{where}: expected a JSON object")
    f = lambda k, t: _field(obj, k, _RECORD_KEYS, t, where)  # noqa: E731
    uid, text = f("user_id", str), f("text", str)
    followers, favorites, verified = f("followers", int), f("favorites", int), f("verified", bool)
    raw_label = f("label", object)
    try:
        label = Label.parse(raw_label)
    except ValueError:
        raise CorpusFormatError(f"{where}: rumor_label has invalid value {raw_label!r}") from None
    raw_replies = obj.get("replies", [])
    if not isinstance(raw_replies, list):
        raise CorpusFormatError(f"{where}: replies must be a list")
    replies = []
    for i, rep in enumerate(raw_replies):
        rw = f"{where}: replies[{i}]"
        if not isinstance(rep, dict):
            raise CorpusFormatError(f"{rw}: expected a JSON object")
        g = lambda k, t: _field(rep, k, _REPLY_KEYS, t, rw)  # noqa: E731
        replies.append(
            ReplyRecord(g("user_id", str), g("text", str), g("followers", int), g("favorites", int), g("verified", bool))
        )
    thread_id = obj.get("thread_id", "")
    return TweetRecord(uid, text, followers, favorites, verified, tuple(replies), label, str(thread_id))


def load_jsonl(path: str | Path, incident_name: str | None = None) -> IncidentCorpus:
    path = Path(path)
    if not path.is_file():
        raise CorpusError(f"JSONL file not found: {path}")
    records = []
    with path.open(encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"line {lineno}: invalid JSON ({exc.msg})") from None
            records.append(_record_from_json(obj, f"line {lineno}"))
    if not records:
        raise CorpusError(f"no records in {path}")
    return IncidentCorpus(incident_name or path.stem, tuple(records))


def record_to_json(rec: TweetRecord) -> dict:
    obj = {
        "user_id": rec.initiator_user_id,
        "text": rec.tweet_text,
        "followers": rec.followers_count,
        "favorites": rec.favorites_count,
        "verified": rec.verified,
        "label": rec.rumor_label.value,
        "replies": [
            {
                "user_id": r.reply_user_id,
                "text": r.reply_text,
                "followers": r.reply_followers_count,
                "favorites": r.reply_favorites_count,
                "verified": r.reply_verified,
            }
            for r in rec.replies
        ],
    }
    if rec.thread_id:
        obj["thread_id"] = rec.thread_id
    return obj


def write_jsonl(corpus: IncidentCorpus | Iterable[TweetRecord], path: str | Path) -> Path:
    records = corpus.records if isinstance(corpus, IncidentCorpus) else corpus
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as f:
        for rec in records:
            f.write(json.dumps(record_to_json(rec), ensure_ascii=False, sort_keys=True) + "\n")
    return path
