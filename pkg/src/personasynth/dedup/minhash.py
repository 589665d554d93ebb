"""Word-unigram MinHash sketches and their Jaccard estimator."""

from __future__ import annotations

import hashlib
import re
from functools import lru_cache
from typing import AbstractSet, Iterable

import numpy as np

from ..errors import IncompatibleSignatures
from ..persona import MinHashSignature

DEFAULT_K = 128
DEFAULT_SEED = 1
EMPTY_VALUE = np.uint64(0xFFFFFFFFFFFFFFFF)

_TOKEN = re.compile(r"[^\W_]+", re.UNICODE)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def tokenize_unigrams(text: str) -> frozenset[str]:
    """Lower-cased word set; any punctuation (hyphens included) separates words."""
    return frozenset(_TOKEN.findall(text.lower()))


def exact_jaccard(a: AbstractSet, b: AbstractSet) -> float:
    if not a and not b:
        return 1.0
    return len(a & b) / len(a | b)


def _mix64(z: np.ndarray) -> np.ndarray:
    # splitmix64 finaliser; uint64 arithmetic wraps modulo 2**64
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


@lru_cache(maxsize=1 << 18)
def _token_hash(token: str) -> int:
    return int.from_bytes(hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest(), "little")


@lru_cache(maxsize=64)
def lane_keys(k: int, seed: int) -> np.ndarray:
    lanes = np.arange(k, dtype=np.uint64) ^ np.uint64(seed & 0xFFFFFFFFFFFFFFFF)
    keys = _mix64(lanes)
    keys.setflags(write=False)
    return keys


def signature_array(tokens: Iterable[str], k: int = DEFAULT_K, seed: int = DEFAULT_SEED) -> np.ndarray:
    """``values[i] = min over tokens of h_i(token)`` with ``h_i(t) = mix(hash(t) ^ mix(seed ^ i))``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    base = np.fromiter((_token_hash(t) for t in tokens), dtype=np.uint64)
    if base.size == 0:
        return np.full(k, EMPTY_VALUE, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return _mix64(base[:, None] ^ lane_keys(k, seed)[None, :]).min(axis=0)


def minhash_signature(tokens: Iterable[str], k: int = DEFAULT_K, seed: int = DEFAULT_SEED) -> MinHashSignature:
    return MinHashSignature.from_array(signature_array(tokens, k, seed), seed=seed)


def estimate_jaccard(s1: MinHashSignature, s2: MinHashSignature) -> float:
    if s1.k != s2.k or s1.seed != s2.seed:
        raise IncompatibleSignatures(f"(k={s1.k}, seed={s1.seed}) vs (k={s2.k}, seed={s2.seed})")
    return agreement(s1.array, s2.array)


def agreement(a: np.ndarray, b: np.ndarray) -> float:
    """Fraction of lanes on which two raw signature arrays agree."""
    return float(np.count_nonzero(a == b)) / a.shape[0]
