"""Cheap heuristics that reject unusable persona descriptions."""

from __future__ import annotations

import enum
import re
from typing import Iterable

from ..persona import MAX_DESCRIPTION_TOKENS, Persona
from .report import DedupCluster, DedupReport, DedupStage

MIN_TOKENS = 3

REFUSAL_PATTERNS = (
    "i'm sorry",
    "i am sorry",
    "as an ai",
    "i cannot",
    "i can't",
    "i can not",
    "i'm unable",
    "i am unable",
    "language model",
    "not possible to determine",
)

_APOSTROPHES = str.maketrans({"’": "'", "‘": "'"})
_HAS_LETTER = re.compile(r"[^\W\d_]", re.UNICODE)


class RejectReason(str, enum.Enum):
    TOO_SHORT = "TooShort"
    TOO_LONG = "TooLong"
    REFUSAL = "RefusalPattern"
    NO_LETTERS = "NoLetters"


def quality_filter(p: Persona) -> RejectReason | None:
    """``None`` keeps the persona; otherwise the first rule it breaks."""
    text = p.description.translate(_APOSTROPHES)
    if not _HAS_LETTER.search(text):
        return RejectReason.NO_LETTERS
    n = len(text.split())
    if n < MIN_TOKENS:
        return RejectReason.TOO_SHORT
    if n > MAX_DESCRIPTION_TOKENS:
        return RejectReason.TOO_LONG
    low = text.lower()
    if any(pat in low for pat in REFUSAL_PATTERNS):
        return RejectReason.REFUSAL
    return None


def apply_quality_filter(personas: Iterable[Persona]) -> tuple[list[Persona], DedupReport]:
    kept, clusters = [], []
    for p in personas:
        reason = quality_filter(p)
        if reason is None:
            kept.append(p)
        else:
            clusters.append(DedupCluster(None, [p.id], DedupStage.HEURISTIC, None, reason.value))
    return kept, DedupReport(clusters)
