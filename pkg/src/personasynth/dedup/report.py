from __future__ import annotations

import enum
from dataclasses import dataclass, field


class DedupStage(str, enum.Enum):
    MINHASH = "minhash"
    EMBEDDING = "embedding"
    HEURISTIC = "heuristic"


@dataclass
class DedupCluster:
    kept_id: str | None
    dropped_ids: list[str]
    stage: DedupStage
    score: float | None
    reason: str | None = None

    def to_dict(self) -> dict:
        d = {
            "kept_id": self.kept_id,
            "dropped_ids": list(self.dropped_ids),
            "stage": self.stage.value,
            "score": self.score,
        }
        if self.reason is not None:
            d["reason"] = self.reason
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "DedupCluster":
        return cls(d.get("kept_id"), list(d["dropped_ids"]), DedupStage(d["stage"]), d.get("score"), d.get("reason"))


@dataclass
class DedupReport:
    clusters: list[DedupCluster] = field(default_factory=list)

    @property
    def dropped(self) -> set[str]:
        return {i for c in self.clusters for i in c.dropped_ids}

    def violations(self) -> list[str]:
        out, seen = [], set()
        for c in self.clusters:
            if c.kept_id is not None and c.kept_id in c.dropped_ids:
                out.append(f"cluster keeps and drops {c.kept_id}")
            members = c.dropped_ids + ([c.kept_id] if c.kept_id is not None else [])
            for m in members:
                if m in seen:
                    out.append(f"{m} appears in more than one cluster")
                seen.add(m)
            if c.score is not None and not 0.0 <= c.score <= 1.0:
                out.append(f"cluster score {c.score} outside [0, 1]")
        return out


class ClusterBuilder:
    """Accumulates greedy leader clusters in ingestion order."""

    def __init__(self, stage: DedupStage):
        self.stage = stage
        self._clusters: dict[str, DedupCluster] = {}

    def add(self, kept_id: str, dropped_id: str, score: float) -> None:
        score = min(1.0, max(0.0, score))
        c = self._clusters.get(kept_id)
        if c is None:
            self._clusters[kept_id] = DedupCluster(kept_id, [dropped_id], self.stage, score)
        else:
            c.dropped_ids.append(dropped_id)
            c.score = min(c.score, score)

    def report(self) -> DedupReport:
        return DedupReport(list(self._clusters.values()))
