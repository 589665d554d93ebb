import numpy as np
import pytest

from personasynth.errors import DimensionMismatch, ZeroNormEmbedding
from personasynth.llm import EmbeddingConfig, Embedder, MockEmbeddingTransport, make_embedder, normalize_rows
from personasynth.llm.base import RetryPolicy


def test_mock_embeddings_are_deterministic_and_unit_length():
    e = make_embedder(EmbeddingConfig(dim=32))
    a = e.embed(["a chef who bakes bread", "a pilot who flies jets"])
    b = make_embedder(EmbeddingConfig(dim=32)).embed(["a chef who bakes bread", "a pilot who flies jets"])
    assert a.shape == (2, 32) and np.array_equal(a, b)
    assert np.allclose(np.linalg.norm(a, axis=1), 1.0)


def test_shared_tokens_mean_higher_similarity():
    e = make_embedder(EmbeddingConfig(dim=256))
    v = e.embed(["a chef who bakes bread daily", "a chef who bakes bread weekly", "an astronaut on orbit"])
    assert v[0] @ v[1] > v[0] @ v[2]


def test_batching_and_validation():
    calls = []

    class Counting(MockEmbeddingTransport):
        def send(self, texts):
            calls.append(len(texts))
            return super().send(texts)

    e = Embedder(Counting(dim=8), dim=8, batch_size=3)
    assert e.embed([f"text {i}" for i in range(7)]).shape == (7, 8)
    assert calls == [3, 3, 1]
    with pytest.raises(ValueError):
        e.embed(["ok", "  "])
    assert e.embed([]).shape == (0, 8)


def test_dimension_checked():
    e = Embedder(MockEmbeddingTransport(dim=8), dim=16, retry=RetryPolicy(1, 0))
    with pytest.raises(DimensionMismatch):
        e.embed(["x"])


def test_zero_rows_rejected():
    with pytest.raises(ZeroNormEmbedding):
        normalize_rows(np.zeros((1, 3)))


def test_replay_kind_not_allowed_for_embeddings():
    with pytest.raises(ValueError):
        EmbeddingConfig(kind="replay")
