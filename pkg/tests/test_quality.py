import pytest

from personasynth.dedup import RejectReason, apply_quality_filter, quality_filter
from personasynth.persona import Persona


@pytest.mark.parametrize("text, reason", [
    ("a retired schoolteacher who paints", None),
    ("a chef", RejectReason.TOO_SHORT),
    (" ".join(["word"] * 151), RejectReason.TOO_LONG),
    ("I'm sorry, but I cannot help with that request", RejectReason.REFUSAL),
    ("I’m sorry, that is not possible to do here", RejectReason.REFUSAL),
    ("As an AI language model I have no persona", RejectReason.REFUSAL),
    ("123 456 789 !!!", RejectReason.NO_LETTERS),
])
def test_rules(text, reason):
    assert quality_filter(Persona(id="p", description=text)) is reason


def test_apply_filter_reports_heuristic_clusters_without_kept_id():
    ps = [Persona(id="a", description="a retired schoolteacher who paints"), Persona(id="b", description="x")]
    kept, rep = apply_quality_filter(ps)
    assert [p.id for p in kept] == ["a"]
    c = rep.clusters[0]
    assert c.kept_id is None and c.dropped_ids == ["b"] and c.reason == "TooShort"
    assert rep.violations() == []
