"""Record/replay store for completions.

A cassette is a JSONL file of ``{key, prompt, decoding, response}`` rows where
``key`` is a stable hash of the prompt and decoding parameters.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
from pathlib import Path

from ..errors import CassetteMiss
from ..jsonl import dumps, iter_records
from .base import Completion, Decoding, Transport


def cassette_key(prompt: str, decoding: Decoding) -> str:
    blob = json.dumps({"prompt": prompt, "decoding": decoding.to_dict()}, sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


class Cassette:
    def __init__(self, path: str | os.PathLike):
        self.path = Path(path)
        self._entries: dict[str, Completion] = {}
        self._lock = threading.Lock()
        if self.path.exists():
            for _, rec in iter_records(self.path):
                self._entries[rec["key"]] = Completion.from_dict(rec["response"])

    def __len__(self) -> int:
        return len(self._entries)

    def get(self, prompt: str, decoding: Decoding) -> Completion:
        key = cassette_key(prompt, decoding)
        try:
            return self._entries[key]
        except KeyError:
            raise CassetteMiss(key) from None

    def put(self, prompt: str, decoding: Decoding, response: Completion) -> None:
        key = cassette_key(prompt, decoding)
        row = {"key": key, "prompt": prompt, "decoding": decoding.to_dict(), "response": response.to_dict()}
        with self._lock:
            if key in self._entries:
                return
            self._entries[key] = response
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "a", encoding="utf-8", newline="\n") as fh:
                fh.write(dumps(row) + "\n")


class ReplayTransport:
    """Serves completions from a cassette only; never touches the network."""

    def __init__(self, cassette: Cassette, producer: str = "replay"):
        self.cassette = cassette
        self.producer = producer

    def send(self, prompt: str, decoding: Decoding) -> Completion:
        return self.cassette.get(prompt, decoding)


class RecordingTransport:
    """Passes requests to ``inner`` and appends every response to the cassette."""

    def __init__(self, inner: Transport, cassette: Cassette):
        self.inner = inner
        self.cassette = cassette
        self.producer = inner.producer

    def send(self, prompt: str, decoding: Decoding) -> Completion:
        resp = self.inner.send(prompt, decoding)
        self.cassette.put(prompt, decoding, resp)
        return resp
