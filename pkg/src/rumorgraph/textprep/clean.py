from __future__ import annotations

import logging
import re
import unicodedata
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .porter import porter_stem

log = logging.getLogger(__name__)

_URL_RE = re.compile(r"(?:https?://|www\.)\S*", re.IGNORECASE)
_NON_TOKEN_RE = re.compile(r"[^a-z0-9_]+")
_RUN3_RE = re.compile(r"([a-z])\1\1")
_RUNS_RE = re.compile(r"([a-z])\1+")
_MAX_STEM_PASSES = 8


def load_wordlist(path: str | Path) -> frozenset[str]:
    """One lowercase word per line, UTF-8; blank lines ignored."""
    text = Path(path).read_text(encoding="utf-8")
    return frozenset(w.strip().lower() for w in text.splitlines() if w.strip())


def _bundled(name: str) -> frozenset[str]:
    text = resources.files(__package__).joinpath("data", name).read_text(encoding="utf-8")
    return frozenset(w.strip().lower() for w in text.splitlines() if w.strip())


@lru_cache(maxsize=None)
def default_stopwords() -> frozenset[str]:
    return _bundled("stopwords.txt")


@lru_cache(maxsize=None)
def default_vocabulary() -> frozenset[str] | None:
    try:
        return _bundled("english_words.txt")
    except FileNotFoundError:
        log.warning("bundled vocabulary missing; noisy-word filter disabled")
        return None


def is_noisy(word: str, vocabulary: frozenset[str]) -> bool:
    """Elongated spelling of a word ("aaand", "aand", "soooo").

    Only out-of-vocabulary words are candidates. Such a word is noisy when it
    has a run of three or more identical letters, or when squeezing every
    letter run down to one letter yields a vocabulary word.
    """
    if word in vocabulary:
        return False
    if _RUN3_RE.search(word):
        return True
    squeezed = _RUNS_RE.sub(r"\1", word)
    return squeezed != word and squeezed in vocabulary


def filter_noise(tokens: list[str], vocabulary: frozenset[str] | None) -> list[str]:
    if vocabulary is None:
        return list(tokens)
    return [t for t in tokens if not is_noisy(t, vocabulary)]


def stem_to_fixpoint(word: str) -> str:
    # Porter is not idempotent (e.g. "abused" -> "abus" -> "abu"); iterating
    # keeps tokenization stable when re-applied to its own output.
    for _ in range(_MAX_STEM_PASSES):
        stemmed = porter_stem(word)
        if stemmed == word:
            break
        word = stemmed
    return word


def _raw_words(text: str) -> list[str]:
    text = _URL_RE.sub(" ", text)
    text = unicodedata.normalize("NFKD", text).encode("ascii", "ignore").decode("ascii")
    return _NON_TOKEN_RE.sub(" ", text.lower()).split()


def clean_and_tokenize(
    text: str,
    stopwords: frozenset[str] | None = None,
    vocabulary: frozenset[str] | None = None,
    noise_filter: bool = True,
) -> list[str]:
    """Lowercased, stopword-free, stemmed tokens of a tweet.

    URLs go first, then everything outside ``[a-z0-9_]`` (so ``#ferguson``
    and ``@user`` keep their word). Stopwords and vocabulary default to the
    bundled lists. Stems that collapse onto a stopword or a noisy form are dropped too.
    """
    stop = default_stopwords() if stopwords is None else stopwords
    vocab = None
    if noise_filter:
        vocab = default_vocabulary() if vocabulary is None else vocabulary
    words = [w for w in _raw_words(text) if w not in stop]
    words = filter_noise(words, vocab)
    out = []
    for w in words:
        if w.isalpha():
            w = stem_to_fixpoint(w)
            if w in stop or (vocab is not None and is_noisy(w, vocab)):
                continue
        out.append(w)
    return out
