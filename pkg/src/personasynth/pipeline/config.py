"""Declarative run configuration: one YAML file, nested sections, unknown keys rejected.

Schema (defaults shown)::

    pipeline:
      corpus: data/demo_corpus.jsonl   # required; JSONL of {id, text, source_tag?, lang?}
      out_dir: runs/demo               # required
      checkpoint_dir: null             # default <out_dir>/checkpoints
      checkpoint_every: 1000
      deterministic_mode: false        # single worker, offline backends, seeded decoding
      seed: 0
      max_concurrency: 4
    backend:    {kind: mock, model_name: gpt-4o, base_url, api_key_env_var, max_concurrency,
                 timeout_ms, cassette_path, record, retry: {max_attempts, backoff_base_ms},
                 mock: {personas_per_call, relations_per_call, answer_noise}}
    embedding:  {kind: mock, model_name, dim: 512, base_url, api_key_env_var, batch_size,
                 timeout_ms, retry: {...}}
    ingest:     {relation_words: [read, write], granularity_instruction: as_specifically_as_possible,
                 max_personas_per_text: 3, max_text_chars: 4000, temperature: 1.0, max_tokens: 512}
    expand:     {iterations: 6, fanout_cap: 5, temperature: 1.0, max_tokens: 768}
    dedup:      {minhash_threshold: 0.9, k: 128, bands: 16, rows: 8, minhash_seed: 1,
                 embedding_threshold: 0.9, block_by_first_band: false}
    synthesize: {scenario: math, mode: zero_shot, modifiers: {}, demos: [], n_per_persona: 1,
                 temperature: 1.0, max_tokens: 1024}
"""

from __future__ import annotations

import collections.abc
import dataclasses
import enum
import hashlib
import json
import types
import typing
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import yaml

from ..errors import ConfigError
from ..llm.base import BackendConfig, BackendKind, Decoding, EmbeddingConfig, MockOptions, RetryPolicy
from ..persona import DEFAULT_MAX_ITERATIONS
from ..synthesis.prompts import Mode
from ..text2persona import T2PConfig


@dataclass(frozen=True)
class ExpandConfig:
    iterations: int = DEFAULT_MAX_ITERATIONS
    fanout_cap: int = 5
    temperature: float = 1.0
    max_tokens: int = 768


@dataclass(frozen=True)
class DedupConfig:
    minhash_threshold: float = 0.9
    k: int = 128
    bands: int = 16
    rows: int = 8
    minhash_seed: int = 1
    embedding_threshold: float = 0.9
    block_by_first_band: bool = False


@dataclass(frozen=True)
class SynthesizeConfig:
    scenario: str = "math"
    mode: Mode = Mode.ZERO_SHOT
    modifiers: Mapping[str, str] = field(default_factory=dict)
    demos: tuple[str, ...] = ()
    n_per_persona: int = 1
    temperature: float = 1.0
    max_tokens: int = 1024


@dataclass(frozen=True)
class RunSettings:
    corpus: str
    out_dir: str
    checkpoint_dir: str | None = None
    checkpoint_every: int = 1000
    deterministic_mode: bool = False
    seed: int = 0
    max_concurrency: int = 4


@dataclass(frozen=True)
class PipelineConfig:
    pipeline: RunSettings
    backend: BackendConfig = field(default_factory=BackendConfig)
    embedding: EmbeddingConfig = field(default_factory=EmbeddingConfig)
    ingest: T2PConfig = field(default_factory=T2PConfig)
    expand: ExpandConfig = field(default_factory=ExpandConfig)
    dedup: DedupConfig = field(default_factory=DedupConfig)
    synthesize: SynthesizeConfig = field(default_factory=SynthesizeConfig)

    @property
    def workers(self) -> int:
        return 1 if self.pipeline.deterministic_mode else self.pipeline.max_concurrency

    @property
    def seed(self) -> int | None:
        return self.pipeline.seed

    @property
    def out_dir(self) -> Path:
        return Path(self.pipeline.out_dir)

    @property
    def checkpoint_dir(self) -> Path:
        return Path(self.pipeline.checkpoint_dir) if self.pipeline.checkpoint_dir else self.out_dir / "checkpoints"

    @property
    def t2p(self) -> T2PConfig:
        return dataclasses.replace(self.ingest, seed=self.seed)

    @property
    def expand_decoding(self) -> Decoding:
        return Decoding(self.expand.temperature, self.expand.max_tokens, self.seed)

    @property
    def synth_decoding(self) -> Decoding:
        return Decoding(self.synthesize.temperature, self.synthesize.max_tokens, self.seed)

    def to_dict(self) -> dict:
        return _plain(dataclasses.asdict(self))

    def hash(self, corpus_digest: str = "") -> str:
        """Content hash used to decide whether checkpoints may be resumed."""
        d = self.to_dict()
        # the corpus enters through its digest, so moving the file keeps checkpoints valid
        for k in ("corpus", "out_dir", "checkpoint_dir", "checkpoint_every", "max_concurrency"):
            d["pipeline"].pop(k)
        d["corpus_digest"] = corpus_digest
        blob = json.dumps(d, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def validate(self) -> None:
        p = self.pipeline
        if not Path(p.corpus).is_file():
            raise ConfigError(f"pipeline.corpus: file not found: {p.corpus}")
        if p.checkpoint_every < 1:
            raise ConfigError("pipeline.checkpoint_every must be >= 1")
        if p.max_concurrency < 1:
            raise ConfigError("pipeline.max_concurrency must be >= 1")
        for name in ("minhash_threshold", "embedding_threshold"):
            v = getattr(self.dedup, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"dedup.{name} must be in [0, 1], got {v}")
        if self.dedup.bands * self.dedup.rows != self.dedup.k:
            raise ConfigError("dedup.bands * dedup.rows must equal dedup.k")
        if self.expand.iterations < 1 or self.expand.fanout_cap < 1:
            raise ConfigError("expand.iterations and expand.fanout_cap must be >= 1")
        if self.synthesize.n_per_persona < 1:
            raise ConfigError("synthesize.n_per_persona must be >= 1")
        if self.synthesize.mode is not Mode.ZERO_SHOT and not self.synthesize.demos:
            raise ConfigError(f"synthesize.mode={self.synthesize.mode.value} needs synthesize.demos")
        if self.backend.kind is BackendKind.REPLAY and not Path(self.backend.cassette_path).is_file():
            raise ConfigError(f"backend.cassette_path: file not found: {self.backend.cassette_path}")
        if p.deterministic_mode:
            if self.backend.kind is BackendKind.HTTP or self.backend.record:
                raise ConfigError("deterministic_mode needs an offline backend (mock or replay)")
            if self.embedding.kind is not BackendKind.MOCK:
                raise ConfigError("deterministic_mode needs the mock embedder")


def _plain(obj: Any) -> Any:
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, Mapping):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


def _coerce(tp: Any, value: Any, where: str) -> Any:
    origin = typing.get_origin(tp)
    if origin is typing.Union or origin is types.UnionType:
        args = [a for a in typing.get_args(tp) if a is not type(None)]
        if value is None:
            return None
        return _coerce(args[0], value, where)
    if dataclasses.is_dataclass(tp):
        if not isinstance(value, Mapping):
            raise ConfigError(f"{where}: expected a mapping")
        return build(tp, value, where)
    if isinstance(tp, type) and issubclass(tp, enum.Enum):
        try:
            return tp(value)
        except ValueError:
            raise ConfigError(f"{where}: {value!r} is not one of {[e.value for e in tp]}") from None
    if origin is tuple:
        if isinstance(value, str) or not isinstance(value, (list, tuple)):
            raise ConfigError(f"{where}: expected a list")
        return tuple(value)
    if origin in (dict, collections.abc.Mapping):
        if not isinstance(value, Mapping):
            raise ConfigError(f"{where}: expected a mapping")
        return {str(k): str(v) for k, v in value.items()}
    if tp is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{where}: expected true/false")
        return value
    if tp is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{where}: expected an integer")
        return value
    if tp is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{where}: expected a number")
        return float(value)
    if tp is str:
        if not isinstance(value, str):
            raise ConfigError(f"{where}: expected a string")
        return value
    return value


def build(cls: type, data: Mapping[str, Any], where: str = "") -> Any:
    """Instantiate a (nested) config dataclass, rejecting unknown keys."""
    hints = typing.get_type_hints(cls)
    names = {f.name for f in dataclasses.fields(cls) if f.init}
    unknown = sorted(set(data) - names)
    if unknown:
        raise ConfigError(f"{where or 'config'}: unknown key(s) {unknown}; allowed: {sorted(names)}")
    kwargs = {k: _coerce(hints[k], v, f"{where}.{k}" if where else k) for k, v in data.items()}
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"{where or 'config'}: {exc}") from None
    except ValueError as exc:
        raise ConfigError(f"{where or 'config'}: {exc}") from None


def load_config(path: str | Path, overrides: Mapping[str, Any] | None = None) -> PipelineConfig:
    try:
        data = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {path}: invalid YAML: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"config {path}: top level must be a mapping")
    for dotted, value in (overrides or {}).items():
        section, _, key = dotted.partition(".")
        data.setdefault(section, {})[key] = value
    if "pipeline" not in data:
        raise ConfigError("config: missing section 'pipeline'")
    return build(PipelineConfig, data)


__all__ = [
    "BackendConfig", "DedupConfig", "EmbeddingConfig", "ExpandConfig", "MockOptions", "PipelineConfig",
    "RetryPolicy", "RunSettings", "SynthesizeConfig", "build", "load_config",
]
