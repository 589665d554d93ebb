"""Per-stage commit markers so an interrupted run can resume."""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path


@dataclass
class Checkpoint:
    stage: str
    ordinal: int
    config_hash: str
    complete: bool = False
    # committed size of each partially written output file
    output_bytes: dict[str, int] = field(default_factory=dict)

    @classmethod
    def load(cls, directory: str | os.PathLike, stage: str) -> "Checkpoint | None":
        path = Path(directory) / f"{stage}.json"
        if not path.exists():
            return None
        try:
            d = json.loads(path.read_text(encoding="utf-8"))
            return cls(**d)
        except (ValueError, TypeError):
            # an unreadable marker is treated as no progress
            return None

    def save(self, directory: str | os.PathLike) -> None:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        path = directory / f"{self.stage}.json"
        tmp = path.with_name(path.name + ".tmp")
        tmp.write_text(json.dumps(asdict(self), sort_keys=True) + "\n", encoding="utf-8")
        os.replace(tmp, path)


def clear(directory: str | os.PathLike) -> None:
    directory = Path(directory)
    if directory.is_dir():
        for f in directory.glob("*.json"):
            f.unlink()
