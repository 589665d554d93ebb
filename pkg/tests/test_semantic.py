import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from personasynth.dedup import dedup_embedding, first_band_key
from personasynth.errors import DimensionMismatch, ZeroNormEmbedding
from personasynth.persona import Persona


def unit_at(cos: float) -> list[float]:
    return [cos, math.sqrt(1 - cos * cos), 0.0]


def make(i, vec):
    return Persona(id=f"p{i}", description=f"persona {i}").with_embedding(vec)


@pytest.mark.parametrize("cos, threshold, dropped", [(0.95, 0.9, True), (0.6, 0.5, True), (0.6, 0.9, False)])
def test_drop_iff_cosine_exceeds_threshold(cos, threshold, dropped):
    a, b = make(0, [1.0, 0.0, 0.0]), make(1, unit_at(cos))
    kept, rep = dedup_embedding([a, b], threshold)
    assert (kept == [a]) is dropped
    if dropped:
        assert rep.clusters[0].kept_id == "p0" and rep.clusters[0].score == pytest.approx(cos)


def test_equal_to_threshold_is_kept():
    a, b = make(0, [1.0, 0.0]), make(1, [1.0, 0.0])
    kept, _ = dedup_embedding([a, b], threshold=1.0)
    assert kept == [a, b]


def test_unnormalised_vectors_are_compared_by_cosine():
    a, b = make(0, [3.0, 0.0, 0.0]), make(1, [10.0, 0.1, 0.0])
    kept, _ = dedup_embedding([a, b])
    assert kept == [a]


def test_dimension_and_norm_errors():
    with pytest.raises(DimensionMismatch):
        dedup_embedding([make(0, [1.0, 0.0]), make(1, [1.0, 0.0, 0.0])])
    with pytest.raises(ZeroNormEmbedding):
        dedup_embedding([make(0, [0.0, 0.0])])
    with pytest.raises(ValueError):
        dedup_embedding([Persona(id="x", description="no vector")])
    with pytest.raises(ValueError):
        dedup_embedding([], threshold=-0.1)


def test_blocking_restricts_comparisons():
    a, b = make(0, [1.0, 0.0]), make(1, [1.0, 0.0])
    kept, _ = dedup_embedding([a, b], block_key=lambda p: p.id)
    assert kept == [a, b]
    assert first_band_key(a) != first_band_key(b)
    assert first_band_key(a) == first_band_key(Persona(id="z", description=a.description))


vectors = st.lists(st.floats(-1, 1, allow_nan=False), min_size=3, max_size=3).filter(lambda v: np.linalg.norm(v) > 1e-3)


@settings(max_examples=50, deadline=None)
@given(st.lists(vectors, max_size=20), st.floats(0, 1))
def test_greedy_scan_properties(vecs, threshold):
    ps = [make(i, v) for i, v in enumerate(vecs)]
    kept, rep = dedup_embedding(ps, threshold)
    assert [p.id for p in kept] == sorted((p.id for p in kept), key=lambda s: int(s[1:]))
    unit = {p.id: np.asarray(p.embedding) / np.linalg.norm(p.embedding) for p in ps}
    for i, a in enumerate(kept):
        for b in kept[i + 1:]:
            assert unit[a.id] @ unit[b.id] <= threshold + 1e-12
    assert rep.violations() == []


@settings(max_examples=30, deadline=None)
@given(st.lists(vectors, max_size=15), st.floats(1e-9, 1.0))
def test_threshold_above_one_is_identity(vecs, eps):
    ps = [make(i, v) for i, v in enumerate(vecs)]
    kept, rep = dedup_embedding(ps, 1.0 + eps)
    assert kept == ps and rep.clusters == []
