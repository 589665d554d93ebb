"""Cosine-similarity dedup over persona embeddings."""

from __future__ import annotations

from typing import Callable, Hashable, Iterable

import numpy as np

from ..errors import DimensionMismatch, ZeroNormEmbedding
from ..persona import Persona
from .lsh import DEFAULT_ROWS
from .minhash import DEFAULT_K, DEFAULT_SEED, signature_array, tokenize_unigrams
from .report import ClusterBuilder, DedupReport, DedupStage

DEFAULT_THRESHOLD = 0.9


def _unit(p: Persona, dim: int | None) -> np.ndarray:
    if p.embedding is None:
        raise ValueError(f"persona {p.id} has no embedding")
    v = np.asarray(p.embedding, dtype=np.float64)
    if dim is not None and v.shape[0] != dim:
        raise DimensionMismatch(f"persona {p.id} embedding has dim {v.shape[0]}, expected {dim}")
    n = np.linalg.norm(v)
    if n == 0:
        raise ZeroNormEmbedding(f"persona {p.id} has a zero embedding")
    return v / n


class _KeptSet:
    def __init__(self, dim: int):
        self._buf = np.empty((64, dim))
        self.n = 0
        self.ids: list[int] = []

    def add(self, v: np.ndarray, idx: int) -> None:
        if self.n == self._buf.shape[0]:
            self._buf = np.concatenate([self._buf, np.empty_like(self._buf)])
        self._buf[self.n] = v
        self.n += 1
        self.ids.append(idx)

    def best(self, v: np.ndarray) -> tuple[int, float] | None:
        if self.n == 0:
            return None
        sims = self._buf[: self.n] @ v
        j = int(np.argmax(sims))
        return self.ids[j], float(sims[j])


def first_band_key(p: Persona, k: int = DEFAULT_K, rows: int = DEFAULT_ROWS, seed: int = DEFAULT_SEED) -> bytes:
    """Blocking key for large inputs: the first LSH band of the persona's MinHash."""
    return signature_array(tokenize_unigrams(p.description), k, seed)[:rows].tobytes()


def dedup_embedding(
    personas: Iterable[Persona],
    threshold: float = DEFAULT_THRESHOLD,
    block_key: Callable[[Persona], Hashable] | None = None,
) -> tuple[list[Persona], DedupReport]:
    """Greedy scan: drop a persona whose cosine to an already kept one exceeds ``threshold``.

    Without ``block_key`` this is exact (each persona against the whole kept
    set).  With a key, comparisons are restricted to personas sharing the key,
    which scales but can miss duplicates that land in different blocks.
    """
    if threshold < 0:
        raise ValueError("threshold must be >= 0")
    survivors: list[Persona] = []
    clusters = ClusterBuilder(DedupStage.EMBEDDING)
    kept: dict[Hashable, _KeptSet] = {}
    dim = None
    for p in personas:
        v = _unit(p, dim)
        dim = v.shape[0]
        bucket = kept.setdefault(block_key(p) if block_key else None, _KeptSet(dim))
        hit = bucket.best(v)
        if hit is not None and hit[1] > threshold:
            if survivors[hit[0]].id != p.id:
                clusters.add(survivors[hit[0]].id, p.id, hit[1])
            continue
        bucket.add(v, len(survivors))
        survivors.append(p)
    return survivors, clusters.report()
