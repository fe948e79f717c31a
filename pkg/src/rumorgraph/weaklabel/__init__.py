"""Weak labeling of reply tweets and per-user rumor-spreader classes."""

from .labeling import (
    SIMILARITY_THRESHOLD,
    SPREADER_CUTOFF,
    UserProfile,
    binarize,
    build_user_profiles,
    class_counts,
    intensity_score,
    label_from_similarity,
    label_replies,
    label_report_row,
    read_profiles,
    write_label_report,
    write_profiles,
)
from .minhash import MinHashSignature, estimate_similarity, minhash_signature, shingles
from .sentiment import Polarity, SentimentScore, sentiment, sentiment_report

__all__ = [
    "SIMILARITY_THRESHOLD",
    "SPREADER_CUTOFF",
    "MinHashSignature",
    "Polarity",
    "SentimentScore",
    "UserProfile",
    "binarize",
    "build_user_profiles",
    "class_counts",
    "estimate_similarity",
    "intensity_score",
    "label_from_similarity",
    "label_replies",
    "label_report_row",
    "minhash_signature",
    "read_profiles",
    "sentiment",
    "sentiment_report",
    "shingles",
    "write_label_report",
    "write_profiles",
]
