from __future__ import annotations

import hashlib
import re
import threading
import time
from collections import Counter
from functools import lru_cache
from typing import Callable, Protocol, Sequence

import numpy as np

from ..errors import DimensionMismatch, ZeroNormEmbedding
from .base import RetryPolicy
from .gateway import call_with_retry

_WORD = re.compile(r"\w+", re.UNICODE)


class EmbeddingTransport(Protocol):
    def send(self, texts: list[str]) -> np.ndarray: ...


class MockEmbeddingTransport:
    """Hash-seeded random projection of a text's token multiset.

    Each token maps to a fixed Gaussian direction, a text is the count-weighted
    sum of its token directions.  Texts sharing most tokens land close together,
    which is what the dedup and band-sampling tests need.
    """

    def __init__(self, dim: int = 512, seed: int = 0):
        self.dim = dim
        self.seed = seed

    @lru_cache(maxsize=65536)
    def _direction(self, token: str) -> np.ndarray:
        digest = hashlib.blake2b(f"{self.seed}:{token}".encode(), digest_size=8).digest()
        rng = np.random.default_rng(int.from_bytes(digest, "little"))
        return rng.standard_normal(self.dim)

    def vector(self, text: str) -> np.ndarray:
        counts = Counter(_WORD.findall(text.lower())) or Counter({text: 1})
        out = np.zeros(self.dim)
        for tok, c in sorted(counts.items()):
            out += c * self._direction(tok)
        return out

    def send(self, texts: list[str]) -> np.ndarray:
        return np.stack([self.vector(t) for t in texts])


class Embedder:
    """Batches, retries and L2-normalises embedding requests."""

    def __init__(
        self,
        transport: EmbeddingTransport,
        dim: int,
        batch_size: int = 64,
        retry: RetryPolicy | None = None,
        max_concurrency: int = 4,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.transport = transport
        self.dim = dim
        self.batch_size = batch_size
        self.retry = retry or RetryPolicy()
        self._permits = threading.BoundedSemaphore(max_concurrency)
        self._sleep = sleep

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        texts = list(texts)
        if not texts:
            return np.zeros((0, self.dim))
        for t in texts:
            if not isinstance(t, str) or not t.strip():
                raise ValueError("embed() needs non-empty strings")
        chunks = []
        for start in range(0, len(texts), self.batch_size):
            batch = texts[start : start + self.batch_size]
            vecs, _ = call_with_retry(lambda: self.transport.send(batch), self.retry, self._permits, self._sleep)
            vecs = np.asarray(vecs, dtype=np.float64)
            if vecs.shape != (len(batch), self.dim):
                raise DimensionMismatch(f"provider returned {vecs.shape}, expected ({len(batch)}, {self.dim})")
            chunks.append(vecs)
        return normalize_rows(np.concatenate(chunks))


def normalize_rows(vectors: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(vectors, axis=1, keepdims=True)
    if np.any(norms == 0):
        raise ZeroNormEmbedding("cannot normalise a zero vector")
    return vectors / norms
