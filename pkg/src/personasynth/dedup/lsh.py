"""LSH banding over MinHash signatures and surface-form dedup."""

from __future__ import annotations

from typing import Hashable, Iterable

import numpy as np

from ..persona import Persona
from .minhash import DEFAULT_K, DEFAULT_SEED, agreement, signature_array, tokenize_unigrams
from .report import ClusterBuilder, DedupReport, DedupStage

DEFAULT_BANDS = 16
DEFAULT_ROWS = 8
DEFAULT_THRESHOLD = 0.9


def candidate_probability(j: float, bands: int = DEFAULT_BANDS, rows: int = DEFAULT_ROWS) -> float:
    """Probability that a pair with Jaccard ``j`` collides in at least one band."""
    return 1.0 - (1.0 - j**rows) ** bands


def scurve_threshold(bands: int = DEFAULT_BANDS, rows: int = DEFAULT_ROWS) -> float:
    """Approximate Jaccard at which the banding S-curve is steepest."""
    return (1.0 / bands) ** (1.0 / rows)


class LSHIndex:
    def __init__(self, bands: int = DEFAULT_BANDS, rows: int = DEFAULT_ROWS):
        if bands < 1 or rows < 1:
            raise ValueError("bands and rows must be >= 1")
        self.bands = bands
        self.rows = rows
        self._buckets: list[dict[bytes, list[Hashable]]] = [{} for _ in range(bands)]

    def _keys(self, values: np.ndarray) -> list[bytes]:
        if values.shape[0] != self.bands * self.rows:
            raise ValueError(f"signature length {values.shape[0]} != bands*rows {self.bands * self.rows}")
        return [values[b * self.rows : (b + 1) * self.rows].tobytes() for b in range(self.bands)]

    def insert(self, key: Hashable, values: np.ndarray) -> None:
        for band, bkey in zip(self._buckets, self._keys(values)):
            band.setdefault(bkey, []).append(key)

    def candidates(self, values: np.ndarray) -> list[Hashable]:
        """Keys sharing at least one band bucket, in insertion order, without repeats."""
        seen, out = set(), []
        for band, bkey in zip(self._buckets, self._keys(values)):
            for key in band.get(bkey, ()):
                if key not in seen:
                    seen.add(key)
                    out.append(key)
        return out


def dedup_minhash(
    personas: Iterable[Persona],
    threshold: float = DEFAULT_THRESHOLD,
    k: int = DEFAULT_K,
    bands: int = DEFAULT_BANDS,
    rows: int = DEFAULT_ROWS,
    seed: int = DEFAULT_SEED,
) -> tuple[list[Persona], DedupReport]:
    """Streaming near-duplicate removal.

    Each persona is checked against the personas kept so far: LSH proposes
    candidates and a candidate counts as a duplicate only if the signature
    estimate reaches ``threshold``.  Duplicates join the cluster of their best
    match (earliest kept on ties); survivors keep ingestion order.
    """
    if bands * rows != k:
        raise ValueError(f"bands*rows ({bands}*{rows}) must equal k ({k})")
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must be in [0, 1]")
    index = LSHIndex(bands, rows)
    kept_sigs: list[np.ndarray] = []
    survivors: list[Persona] = []
    clusters = ClusterBuilder(DedupStage.MINHASH)
    for p in personas:
        sig = signature_array(tokenize_unigrams(p.description), k, seed)
        best, best_score = None, -1.0
        for idx in index.candidates(sig):
            score = agreement(sig, kept_sigs[idx])
            if score >= threshold and score > best_score:
                best, best_score = idx, score
        if best is None:
            index.insert(len(survivors), sig)
            kept_sigs.append(sig)
            survivors.append(p)
        elif survivors[best].id != p.id:
            clusters.add(survivors[best].id, p.id, best_score)
    return survivors, clusters.report()
