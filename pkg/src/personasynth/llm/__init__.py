"""Completion and embedding backends behind one small interface."""

from __future__ import annotations

from .base import (
    GREEDY,
    Backend,
    BackendConfig,
    BackendKind,
    Completion,
    Decoding,
    EmbeddingConfig,
    MockOptions,
    RetryPolicy,
)
from .cassette import Cassette, RecordingTransport, ReplayTransport, cassette_key
from .embed import Embedder, MockEmbeddingTransport, normalize_rows
from .gateway import Gateway, call_with_retry
from .mock import MockTransport, mock_complete


def make_backend(config: BackendConfig) -> Gateway:
    if config.kind is BackendKind.MOCK:
        transport = MockTransport(config.mock, producer=f"mock:{config.model_name}")
    elif config.kind is BackendKind.REPLAY:
        transport = ReplayTransport(Cassette(config.cassette_path), producer=config.model_name)
    else:
        from .http import OpenAICompatibleTransport

        transport = OpenAICompatibleTransport(config)
    if config.record and config.kind is not BackendKind.REPLAY:
        if not config.cassette_path:
            raise ValueError("record=True needs cassette_path")
        transport = RecordingTransport(transport, Cassette(config.cassette_path))
    return Gateway(transport, max_concurrency=config.max_concurrency, retry=config.retry)


def make_embedder(config: EmbeddingConfig, max_concurrency: int = 4) -> Embedder:
    if config.kind is BackendKind.MOCK:
        transport = MockEmbeddingTransport(dim=config.dim)
    else:
        from .http import OpenAICompatibleEmbeddingTransport

        transport = OpenAICompatibleEmbeddingTransport(config)
    return Embedder(transport, dim=config.dim, batch_size=config.batch_size, retry=config.retry,
                    max_concurrency=max_concurrency)


__all__ = [
    "GREEDY", "Backend", "BackendConfig", "BackendKind", "Cassette", "Completion", "Decoding",
    "Embedder", "EmbeddingConfig", "Gateway", "MockEmbeddingTransport", "MockOptions", "MockTransport",
    "RecordingTransport", "ReplayTransport", "RetryPolicy", "call_with_retry", "cassette_key",
    "make_backend", "make_embedder", "mock_complete", "normalize_rows",
]
