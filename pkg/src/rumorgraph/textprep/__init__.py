"""Tweet cleaning: URL/punctuation stripping, stopwords, noise words, stemming."""

from .clean import (
    clean_and_tokenize,
    default_stopwords,
    default_vocabulary,
    filter_noise,
    is_noisy,
    load_wordlist,
    stem_to_fixpoint,
)
from .porter import porter_stem

__all__ = [
    "clean_and_tokenize",
    "default_stopwords",
    "default_vocabulary",
    "filter_noise",
    "is_noisy",
    "load_wordlist",
    "porter_stem",
    "stem_to_fixpoint",
]
