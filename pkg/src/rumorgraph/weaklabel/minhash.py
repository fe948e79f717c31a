"""MinHash sketches over token shingles.

Each of the ``num_hashes`` functions is a splitmix64 finaliser applied to the
shingle's 64-bit digest XOR-ed with a per-index key, so every function is a
bijection on 64-bit words and the family is fixed by ``seed``.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def _mix64(x: np.ndarray) -> np.ndarray:
    x = x + _GOLDEN
    x = (x ^ (x >> np.uint64(30))) * _M1
    x = (x ^ (x >> np.uint64(27))) * _M2
    return x ^ (x >> np.uint64(31))


@lru_cache(maxsize=32)
def _hash_keys(num_hashes: int, seed: int) -> np.ndarray:
    idx = np.arange(num_hashes, dtype=np.uint64)
    base = _mix64(np.array([seed & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64))
    keys = _mix64(base ^ (idx * _GOLDEN))
    keys.flags.writeable = False
    return keys


def shingles(tokens: Sequence[str], shingle_size: int) -> set[tuple[str, ...]]:
    """Contiguous ``shingle_size``-grams; a short list is one whole-list shingle."""
    if shingle_size < 1:
        raise ValueError("shingle_size must be >= 1")
    tokens = tuple(tokens)
    if len(tokens) < shingle_size:
        return {tokens}
    return {tokens[i : i + shingle_size] for i in range(len(tokens) - shingle_size + 1)}


def _digest(shingle: tuple[str, ...]) -> int:
    data = "\x1f".join(shingle).encode("utf-8")
    return int.from_bytes(hashlib.blake2b(data, digest_size=8).digest(), "little")


@dataclass(frozen=True, eq=False)
class MinHashSignature:
    hashes: np.ndarray
    num_hashes: int
    shingle_size: int
    seed: int

    def __eq__(self, other):
        if not isinstance(other, MinHashSignature):
            return NotImplemented
        return self.params == other.params and bool(np.array_equal(self.hashes, other.hashes))

    @property
    def params(self) -> tuple[int, int, int]:
        return (self.num_hashes, self.shingle_size, self.seed)


def minhash_signature(
    tokens: Sequence[str], num_hashes: int = 256, shingle_size: int = 2, seed: int = 42
) -> MinHashSignature:
    if num_hashes < 1:
        raise ValueError("num_hashes must be >= 1")
    digests = np.fromiter(
        (_digest(s) for s in sorted(shingles(tokens, shingle_size))), dtype=np.uint64
    )
    keys = _hash_keys(num_hashes, seed)
    hashes = _mix64(digests[:, None] ^ keys[None, :]).min(axis=0)
    hashes.flags.writeable = False
    return MinHashSignature(hashes, num_hashes, shingle_size, seed)


def estimate_similarity(a: MinHashSignature, b: MinHashSignature) -> float:
    """Fraction of hash functions whose minima agree (Jaccard estimate)."""
    if a.params != b.params:
        raise ValueError(
            f"signature parameters differ: (num_hashes, shingle_size, seed) {a.params} vs {b.params}"
        )
    return np.count_nonzero(a.hashes == b.hashes) / a.num_hashes
