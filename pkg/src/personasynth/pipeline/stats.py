"""Counts and distributions over a persona store (a personas JSONL file or a run directory)."""

from __future__ import annotations

import os
from collections import Counter
from pathlib import Path

from ..dedup.report import DedupCluster
from ..jsonl import read_typed
from ..persona import Persona
from .run import STAGES, stage_dir

HIST_WIDTH = 10
HIST_MAX = 150


def _bucket(n: int) -> str:
    if n >= HIST_MAX:
        return f"{HIST_MAX}+"
    lo = (n // HIST_WIDTH) * HIST_WIDTH
    return f"{lo}-{lo + HIST_WIDTH - 1}"


def persona_stats(path: str | os.PathLike) -> dict:
    personas = read_typed(path, Persona.from_dict)
    total = 0
    provenance: Counter[str] = Counter()
    lengths: Counter[str] = Counter()
    for p in personas:
        total += 1
        provenance[p.provenance.kind] += 1
        lengths[_bucket(len(p.description.split()))] += 1
    order = [_bucket(i) for i in range(0, HIST_MAX + 1, HIST_WIDTH)]
    return {
        "personas": total,
        "by_provenance": dict(sorted(provenance.items())),
        "token_length_histogram": {b: lengths[b] for b in order if lengths[b]},
    }


def _personas_file(run_dir: Path) -> Path | None:
    for stage in reversed(STAGES):
        for name in ("personas.jsonl", "nodes.jsonl"):
            f = stage_dir(run_dir, stage) / name
            if f.exists():
                return f
    return None


def stats(store: str | os.PathLike) -> dict:
    """Stats for a personas file, or for the last persona stage of a run directory plus drop rates."""
    store = Path(store)
    if not store.exists():
        raise FileNotFoundError(store)
    if store.is_file():
        return persona_stats(store)
    target = _personas_file(store)
    out = persona_stats(target) if target else {"personas": 0, "by_provenance": {}, "token_length_histogram": {}}
    drops = {}
    for stage in ("quality", "minhash", "semantic"):
        report = stage_dir(store, stage) / "report.jsonl"
        kept = stage_dir(store, stage) / "personas.jsonl"
        if not report.exists() or not kept.exists():
            continue
        dropped = sum(len(c.dropped_ids) for c in read_typed(report, DedupCluster.from_dict))
        survived = sum(1 for _ in read_typed(kept, lambda d: d))
        seen = dropped + survived
        drops[stage] = {"in": seen, "dropped": dropped, "rate": dropped / seen if seen else 0.0}
    out["drop_rates"] = drops
    return out
