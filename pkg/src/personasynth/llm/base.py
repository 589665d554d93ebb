from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Protocol


@dataclass(frozen=True)
class Decoding:
    temperature: float = 1.0
    max_tokens: int = 1024
    seed: int | None = None

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be >= 1")

    def to_dict(self) -> dict:
        return {"temperature": self.temperature, "max_tokens": self.max_tokens, "seed": self.seed}


GREEDY = Decoding(temperature=0.0)


@dataclass(frozen=True)
class Completion:
    text: str
    producer: str
    usage: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"text": self.text, "producer": self.producer, "usage": dict(self.usage)}

    @classmethod
    def from_dict(cls, d: dict) -> "Completion":
        return cls(text=d["text"], producer=d.get("producer", ""), usage=dict(d.get("usage", {})))


class BackendKind(str, enum.Enum):
    HTTP = "http_openai_compatible"
    MOCK = "mock"
    REPLAY = "replay"


@dataclass(frozen=True)
class RetryPolicy:
    max_attempts: int = 5
    backoff_base_ms: int = 500

    def __post_init__(self):
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")
        if self.backoff_base_ms < 0:
            raise ValueError("backoff_base_ms must be >= 0")

    def delay_s(self, attempt: int) -> float:
        """Backoff before retry number ``attempt`` (1-based)."""
        return self.backoff_base_ms * (2 ** (attempt - 1)) / 1000.0


@dataclass(frozen=True)
class MockOptions:
    personas_per_call: int = 2
    relations_per_call: int = 2
    answer_noise: float = 0.0


@dataclass(frozen=True)
class BackendConfig:
    kind: BackendKind = BackendKind.MOCK
    base_url: str = "https://api.openai.com/v1"
    model_name: str = "gpt-4o"
    api_key_env_var: str = "OPENAI_API_KEY"
    max_concurrency: int = 4
    retry: RetryPolicy = field(default_factory=RetryPolicy)
    timeout_ms: int = 60_000
    cassette_path: str | None = None
    record: bool = False
    mock: MockOptions = field(default_factory=MockOptions)

    def __post_init__(self):
        object.__setattr__(self, "kind", BackendKind(self.kind))
        if self.max_concurrency < 1:
            raise ValueError("max_concurrency must be >= 1")
        if self.timeout_ms < 1:
            raise ValueError("timeout_ms must be >= 1")
        if self.kind is BackendKind.REPLAY and not self.cassette_path:
            raise ValueError("replay backend needs cassette_path")


@dataclass(frozen=True)
class EmbeddingConfig:
    kind: BackendKind = BackendKind.MOCK
    model_name: str = "text-embedding-3-small"
    dim: int = 512
    base_url: str = "https://api.openai.com/v1"
    api_key_env_var: str = "OPENAI_API_KEY"
    batch_size: int = 64
    retry: RetryPolicy = field(default_factory=RetryPolicy)
    timeout_ms: int = 60_000

    def __post_init__(self):
        object.__setattr__(self, "kind", BackendKind(self.kind))
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.kind is BackendKind.REPLAY:
            raise ValueError("embeddings support kinds mock and http_openai_compatible only")


class Transport(Protocol):
    """One raw request to a provider; retries and permits live in the gateway."""

    producer: str

    def send(self, prompt: str, decoding: Decoding) -> Completion: ...


class Backend(Protocol):
    producer: str

    def complete(self, prompt: str, decoding: Decoding = ...) -> Completion: ...
