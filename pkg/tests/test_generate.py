import pytest

from personasynth.errors import AuthError
from personasynth.llm.base import Decoding
from personasynth.persona import Persona, Scenario
from personasynth.synthesis import SynthesisJob, convert_tool_schema_to_impl, derive_demo_personas, synthesize


def test_items_per_persona_and_order(mock_backend):
    ps = [Persona.create(f"a {w} who restores old clocks") for w in ("baker", "nurse", "pilot")]
    job = SynthesisJob("math", decoding=Decoding(seed=3))
    items = list(synthesize(ps, job, mock_backend, n_per_persona=2))
    assert [i.persona_id for i in items] == [p.id for p in ps for _ in range(2)]
    assert len({i.id for i in items}) == 6
    assert all(i.scenario is Scenario.MATH and i.output_text for i in items)
    assert items[0].meta["repetition"] == "0" and items[1].meta["repetition"] == "1"


def test_repetitions_use_distinct_seeds(scripted, persona):
    backend, t = scripted(lambda p, d: f"seed={d.seed}")
    items = list(synthesize([persona], SynthesisJob("logic", decoding=Decoding(seed=10)), backend, 3))
    assert [i.output_text for i in items] == ["seed=10", "seed=11", "seed=12"]


def test_focus_items_are_labelled(mock_backend, persona):
    [item] = synthesize([persona], SynthesisJob("math", modifiers={"focus": "geometry"}), mock_backend)
    assert item.scenario is Scenario.MATH_FOCUS and item.meta["modifier.focus"] == "geometry"


def test_empty_completion_is_skipped(scripted, persona):
    backend, _ = scripted(lambda p, d: "   ")
    skips = []
    assert list(synthesize([persona], SynthesisJob("math"), backend, on_skip=skips.append)) == []
    assert len(skips) == 1 and skips[0].stage == "synthesize"


def test_fatal_error_propagates(scripted, persona):
    def boom(p, d):
        raise AuthError("no key")

    backend, _ = scripted(boom)
    with pytest.raises(AuthError):
        list(synthesize([persona], SynthesisJob("math"), backend))


def test_derive_demo_personas(scripted):
    backend, _ = scripted(lambda p, d: '["a retired sea captain"]' if "ship" in p else "[]")
    skips = []
    demos = derive_demo_personas(["A ship sails 30 nautical miles...", "Solve x+1=2."], backend, on_skip=skips.append)
    assert len(demos) == 1 and demos[0].demo_persona.description == "a retired sea captain"
    assert len(skips) == 1


def test_tool_schema_to_impl(mock_backend, persona):
    [schema] = synthesize([persona], SynthesisJob("tool_schema"), mock_backend)
    impl = convert_tool_schema_to_impl(schema, mock_backend)
    assert impl.scenario is Scenario.TOOL_IMPL and impl.persona_id == persona.id
    assert impl.meta["schema_item_id"] == schema.id and schema.output_text in impl.prompt_text
    [math] = synthesize([persona], SynthesisJob("math"), mock_backend)
    with pytest.raises(ValueError):
        convert_tool_schema_to_impl(math, mock_backend)
