import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from personasynth.llm.base import MockOptions
from personasynth.llm.mock import MockTransport
from personasynth.persona import FromPersona, Persona, RelationEdge
from personasynth.persona2persona import PersonaGraph, build_p2p_prompt, expand_graph, parse_relations
from personasynth.errors import MalformedResponse

from conftest import gateway


def mock(fanout: int):
    return gateway(MockTransport(MockOptions(relations_per_call=fanout)))


def test_prompt_wraps_persona_and_asks_for_relations(persona):
    req = build_p2p_prompt(persona)
    assert "[PERSONA START]\n" + persona.description + "\n[PERSONA END]" in req.prompt
    assert "close relationship with the given persona" in req.prompt
    assert "relation" in req.prompt and "description" in req.prompt


def test_parse_relations_builds_children_and_edges(persona):
    raw = json.dumps([{"relation": "patient", "description": "a diver recovering from an ear injury"}])
    children, edges = parse_relations(raw, persona, 1)
    assert children[0].provenance == FromPersona(persona.id, "patient", 1)
    assert edges == [RelationEdge(persona.id, children[0].id, "patient", 1)]


@pytest.mark.parametrize("raw", ['[{"relation": "x"}]', '{"relation": "x", "description": "y"}', "nope"])
def test_parse_relations_rejects_bad_shapes(persona, raw):
    with pytest.raises(MalformedResponse):
        parse_relations(raw, persona, 1)


def test_full_binary_tree_after_six_iterations(persona):
    g = expand_graph([persona], mock(2), iterations=6, fanout_cap=5)
    assert len(g.nodes) == 2**7 - 1
    assert g.max_iteration == 6
    assert g.violations() == []


def test_default_iterations_is_six(persona):
    g = expand_graph([persona], mock(1))
    assert g.max_iteration == 6 and len(g.nodes) == 7


def test_fanout_cap_limits_children(persona):
    g = expand_graph([persona], mock(4), iterations=1, fanout_cap=2)
    assert len(g.nodes) == 3 and len(g.edges) == 2


def test_duplicate_children_collapse_without_edges(persona, scripted):
    reply = json.dumps([
        {"relation": "friend", "description": "a retired ferry captain"},
        {"relation": "neighbour", "description": "a retired ferry captain"},
    ])
    backend, _ = scripted(lambda p, d: reply)
    g = expand_graph([persona], backend, iterations=3)
    assert len(g.nodes) == 2 and len(g.edges) == 1
    assert g.violations() == []


def test_malformed_reply_drops_only_that_persona(scripted):
    a, b = Persona.create("a beekeeper in the hills"), Persona.create("a violin maker in town")

    def reply(prompt, d):
        if "beekeeper" in prompt:
            return "not json"
        return json.dumps([{"relation": "apprentice", "description": "a young apprentice luthier"}])

    backend, _ = scripted(reply)
    g = expand_graph([a, b], backend, iterations=1)
    assert set(p.description for p in g.nodes.values()) == {a.description, b.description, "a young apprentice luthier"}


def test_graph_violations_detect_dangling_and_deep_edges():
    a, b = Persona.create("a b c"), Persona.create("d e f")
    g = PersonaGraph({a.id: a}, [RelationEdge(a.id, b.id, "friend", 7)])
    v = g.violations()
    assert any("dangling" in s or "missing" in s for s in v)
    assert any("iteration" in s for s in v)


def test_bad_arguments(persona, mock_backend):
    with pytest.raises(ValueError):
        expand_graph([persona], mock_backend, iterations=0)
    with pytest.raises(ValueError):
        expand_graph([persona], mock_backend, fanout_cap=0)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 3), st.integers(1, 4), st.integers(1, 3), st.integers(0, 10))
def test_expansion_invariants(fanout, iterations, cap, seed):
    from personasynth.llm.base import Decoding

    seeds = [Persona.create(f"seed persona number {i} who enjoys sailing") for i in range(2)]
    g = expand_graph(seeds, mock(fanout), iterations, cap, decoding=Decoding(seed=seed))
    assert g.violations(max_iterations=iterations) == []
    assert g.max_iteration <= iterations
    per_parent = {}
    for e in g.edges:
        per_parent[e.parent_id] = per_parent.get(e.parent_id, 0) + 1
        assert g.nodes[e.child_id].provenance.depth == e.iteration
    assert all(n <= min(cap, fanout) for n in per_parent.values())
    descs = [p.description for p in g.nodes.values()]
    assert len(descs) == len(set(descs))
