"""Flat-file store: UTF-8 JSONL, one record per line."""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Any, Callable, Iterable, Iterator, TypeVar

from .errors import CorruptRecord

T = TypeVar("T")


def dumps(record: dict) -> str:
    # ensure_ascii=False keeps the files human-readable; key order follows the record
    return json.dumps(record, ensure_ascii=False, separators=(",", ":"))


def iter_records(path: str | os.PathLike) -> Iterator[tuple[int, dict]]:
    """Yield ``(line_no, record)``; blank lines are skipped."""
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorruptRecord(path, line_no, f"invalid JSON: {exc.msg}") from None
            if not isinstance(rec, dict):
                raise CorruptRecord(path, line_no, "record is not a JSON object")
            yield line_no, rec


def read_typed(path: str | os.PathLike, decode: Callable[[dict], T]) -> Iterator[T]:
    for line_no, rec in iter_records(path):
        try:
            yield decode(rec)
        except (KeyError, TypeError, ValueError) as exc:
            raise CorruptRecord(path, line_no, f"bad record: {exc!r}") from None


def write_records(path: str | os.PathLike, records: Iterable[Any]) -> int:
    """Atomically write records (dicts or objects with ``to_dict``); returns the count."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    n = 0
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(dumps(rec.to_dict() if hasattr(rec, "to_dict") else rec))
            fh.write("\n")
            n += 1
    os.replace(tmp, path)
    return n
