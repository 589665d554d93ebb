"""Surface-form (MinHash/LSH) and semantic (embedding) dedup plus quality heuristics."""

from .lsh import LSHIndex, candidate_probability, dedup_minhash, scurve_threshold
from .minhash import (
    agreement,
    estimate_jaccard,
    exact_jaccard,
    minhash_signature,
    signature_array,
    tokenize_unigrams,
)
from .quality import RejectReason, apply_quality_filter, quality_filter
from .report import DedupCluster, DedupReport, DedupStage
from .semantic import dedup_embedding, first_band_key

__all__ = [
    "DedupCluster", "DedupReport", "DedupStage", "LSHIndex", "RejectReason", "agreement",
    "apply_quality_filter", "candidate_probability", "dedup_embedding", "dedup_minhash",
    "estimate_jaccard", "exact_jaccard", "first_band_key", "minhash_signature", "quality_filter",
    "scurve_threshold", "signature_array", "tokenize_unigrams",
]
