from __future__ import annotations

import json
from pathlib import Path

import pytest

from rumorgraph.ingest import IncidentCorpus, Label, ReplyRecord, TweetRecord

DATA = Path(__file__).parent / "data"


def tweet(uid, text, label, replies=(), followers=10, favorites=5, verified=False, thread_id=""):
    return TweetRecord(uid, text, followers, favorites, verified, tuple(replies), label, thread_id)


def reply(uid, text, followers=1, favorites=2, verified=False):
    return ReplyRecord(uid, text, followers, favorites, verified)


@pytest.fixture
def small_corpus() -> IncidentCorpus:
    """Two threads; u2 copies the rumor verbatim, u3 writes something unrelated."""
    rumor_text = "police confirm hostage situation at the kosher market in paris"
    other_text = "thoughts with everyone affected by the attack today"
    return IncidentCorpus(
        "toy",
        (
            tweet("u1", rumor_text, Label.RUMOR, [reply("u2", rumor_text), reply("u3", "lovely weather for a walk in the park")], thread_id="t1"),
            tweet("u4", other_text, Label.NON_RUMOR, [reply("u2", other_text), reply("u1", "completely different words about football scores")], thread_id="t2"),
        ),
    )


def write_pheme_thread(root: Path, group: str, thread_id: str, source: dict, reactions: list[dict]) -> Path:
    d = root / group / thread_id
    (d / "source-tweets").mkdir(parents=True)
    (d / "reactions").mkdir()
    (d / "source-tweets" / f"{thread_id}.json").write_text(json.dumps(source), encoding="utf-8")
    for k, r in enumerate(reactions):
        (d / "reactions" / f"{thread_id}_{k}.json").write_text(json.dumps(r), encoding="utf-8")
    return d


def pheme_tweet(id_str, uid, text, followers=3, favourites=4, verified=False):
    return {
        "id_str": id_str,
        "text": text,
        "user": {"id_str": uid, "followers_count": followers, "favourites_count": favourites, "verified": verified},
    }
