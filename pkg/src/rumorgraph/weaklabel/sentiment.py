"""Lexicon polarity for reply tweets and the rumor / non-rumor sentiment split."""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from importlib import resources
from typing import Mapping

from ..ingest import IncidentCorpus, Label

_WORD_RE = re.compile(r"[a-z]+(?:'[a-z]+)?")
NEGATIONS = frozenset(
    """not no never nor cannot cant can't dont don't doesnt doesn't didnt didn't
    isnt isn't arent aren't wasnt wasn't werent weren't wont won't wouldnt
    wouldn't shouldnt shouldn't couldnt couldn't aint ain't nothing neither
    without hardly""".split()
)
NEGATION_WINDOW = 2


class Polarity(str, Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    NEUTRAL = "neutral"


@dataclass(frozen=True)
class SentimentScore:
    polarity: float
    label: Polarity


@lru_cache(maxsize=None)
def default_lexicon() -> dict[str, float]:
    lex: dict[str, float] = {}
    data = resources.files(__package__).joinpath("data")
    for name, weight in (("positive.txt", 1.0), ("negative.txt", -1.0)):
        for w in data.joinpath(name).read_text(encoding="utf-8").split():
            lex[w.lower()] = weight
    return lex


def sentiment(text: str, lexicon: Mapping[str, float] | None = None) -> SentimentScore:
    """Mean lexicon polarity of the matched words in ``text``.

    A negation word up to two positions before a matched word flips that
    word's sign.
    """
    lex = default_lexicon() if lexicon is None else lexicon
    words = _WORD_RE.findall(text.lower())
    values = []
    for i, w in enumerate(words):
        v = lex.get(w)
        if v is None:
            continue
        if any(words[j] in NEGATIONS for j in range(max(0, i - NEGATION_WINDOW), i)):
            v = -v
        values.append(v)
    polarity = sum(values) / len(values) if values else 0.0
    polarity = min(1.0, max(-1.0, polarity))
    if polarity > 0:
        label = Polarity.POSITIVE
    elif polarity < 0:
        label = Polarity.NEGATIVE
    else:
        label = Polarity.NEUTRAL
    return SentimentScore(polarity, label)


def sentiment_report(
    corpus: IncidentCorpus,
    reply_labels: Mapping[tuple[int, int], Label] | None = None,
    lexicon: Mapping[str, float] | None = None,
) -> dict[str, dict[str, float]]:
    """Positive/negative reply percentages per category, neutral replies excluded.

    A reply's category is its initiator tweet's label, unless ``reply_labels``
    is given, in which case the weak label of the reply itself is used.
    Categories with no polar replies are left out.
    """
    tallies: dict[Label, dict[Polarity, int]] = {}
    for i, rec in enumerate(corpus.records):
        for j, rep in enumerate(rec.replies):
            cat = reply_labels[(i, j)] if reply_labels is not None else rec.rumor_label
            pol = sentiment(rep.reply_text, lexicon).label
            counts = tallies.setdefault(cat, {p: 0 for p in Polarity})
            counts[pol] += 1

    report: dict[str, dict[str, float]] = {}
    for cat in (Label.RUMOR, Label.NON_RUMOR):
        counts = tallies.get(cat)
        if not counts:
            continue
        polar = counts[Polarity.POSITIVE] + counts[Polarity.NEGATIVE]
        if polar == 0:
            continue
        report[cat.value] = {
            "positive": 100.0 * counts[Polarity.POSITIVE] / polar,
            "negative": 100.0 * counts[Polarity.NEGATIVE] / polar,
            "polar_replies": float(polar),
            "neutral_excluded": float(counts[Polarity.NEUTRAL]),
        }
    return report
