import json

import pytest

from personasynth.errors import AuthError, MalformedResponse, TextTooLong, TransientBackendError
from personasynth.persona import FromText, Granularity, SourceText
from personasynth.text2persona import (
    T2PConfig,
    build_t2p_prompt,
    parse_persona_response,
    run_text_to_persona,
    strip_fences,
)

TEXT = SourceText("t1", "Rising sea temperatures are bleaching coral reefs along the coast.")


def test_prompt_asks_one_question_per_relation_word_and_embeds_text():
    req = build_t2p_prompt(TEXT, T2PConfig(relation_words=("read", "like")))
    assert "Who is likely to read the following text?" in req.prompt
    assert "Who is likely to like the following text?" in req.prompt
    assert "[TEXT START]\n" + TEXT.text + "\n[TEXT END]" in req.prompt
    assert "as specifically as possible" in req.prompt
    assert "up to 3" in req.prompt


def test_coarse_granularity_changes_instruction_and_label():
    cfg = T2PConfig(granularity_instruction="coarse")
    req = build_t2p_prompt(TEXT, cfg)
    assert "as specifically as possible" not in req.prompt
    assert cfg.granularity is Granularity.COARSE
    assert T2PConfig().granularity is Granularity.FINE


def test_config_validation():
    with pytest.raises(ValueError):
        T2PConfig(relation_words=())
    with pytest.raises(ValueError):
        T2PConfig(relation_words=("read", " "))
    with pytest.raises(ValueError):
        T2PConfig(granularity_instruction="vague")
    with pytest.raises(ValueError):
        T2PConfig(max_personas_per_text=0)


def test_overlong_text_raises_when_building_directly():
    with pytest.raises(TextTooLong):
        build_t2p_prompt(SourceText("t", "x" * 50), T2PConfig(max_text_chars=10))


def test_overlong_text_is_truncated_by_the_stage(scripted):
    backend, transport = scripted(lambda p, d: '["a reader of long things"]')
    cfg = T2PConfig(relation_words=("read",), max_text_chars=10)
    out = list(run_text_to_persona([SourceText("t", "abcdefghijKLMNOP")], cfg, backend))
    assert len(out) == 1
    assert "abcdefghij\n[TEXT END]" in transport.prompts[0]
    assert "KLM" not in transport.prompts[0]


def test_strip_fences():
    assert strip_fences('```json\n["a"]\n```') == '["a"]'
    assert strip_fences('  ["a"] ') == '["a"]'


def test_parse_dedups_caps_and_tags_relation_word():
    raw = json.dumps(["a chef", "a chef", "  a   baker ", "a butcher", "a farmer"])
    ps = parse_persona_response(raw, "t1", T2PConfig(max_personas_per_text=3), relation_word="write")
    assert [p.description for p in ps] == ["a chef", "a baker", "a butcher"]
    assert all(p.provenance == FromText("t1", "write") for p in ps)


@pytest.mark.parametrize("raw", ["not json", '{"a": 1}', "[1, 2]"])
def test_parse_rejects_bad_shapes(raw):
    with pytest.raises(MalformedResponse):
        parse_persona_response(raw, "t", T2PConfig())


def test_parse_tolerates_chatter_around_array():
    ps = parse_persona_response('Sure! Here you go: ["a sailor who races dinghies"] Hope it helps.', "t", T2PConfig())
    assert [p.description for p in ps] == ["a sailor who races dinghies"]


def test_one_call_per_relation_word_with_provenance(mock_backend):
    cfg = T2PConfig(relation_words=("read", "write"), seed=0)
    out = list(run_text_to_persona([TEXT], cfg, mock_backend))
    words = [p.provenance.relation_word for p in out]
    assert set(words) == {"read", "write"}
    assert words == sorted(words, key=["read", "write"].index)


def test_malformed_reply_is_retried_once_then_skipped(scripted):
    backend, transport = scripted(lambda p, d: "garbage")
    skips = []
    out = list(run_text_to_persona([TEXT], T2PConfig(relation_words=("read",)), backend, on_skip=skips.append))
    assert out == [] and len(transport.prompts) == 2
    assert len(skips) == 1 and skips[0].ref_id == "t1#read" and "MalformedResponse" in skips[0].reason


def test_retry_recovers(scripted):
    replies = iter(["garbage", '["a geologist"]'])
    backend, _ = scripted(lambda p, d: next(replies))
    out = list(run_text_to_persona([TEXT], T2PConfig(relation_words=("read",)), backend))
    assert [p.description for p in out] == ["a geologist"]


def test_transient_exhaustion_skips_but_auth_aborts(scripted):
    def flaky(p, d):
        raise TransientBackendError("boom", status=503)

    backend, _ = scripted(flaky)
    skips = []
    assert list(run_text_to_persona([TEXT], T2PConfig(), backend, on_skip=skips.append)) == []
    assert len(skips) == 2

    def denied(p, d):
        raise AuthError("no key")

    backend, _ = scripted(denied)
    with pytest.raises(AuthError):
        list(run_text_to_persona([TEXT], T2PConfig(), backend))


def test_deterministic_with_mock_and_seed(mock_backend):
    cfg = T2PConfig(seed=3)
    corpus = [TEXT, SourceText("t2", "A new sourdough recipe with a long cold proof.")]
    a = list(run_text_to_persona(corpus, cfg, mock_backend))
    b = list(run_text_to_persona(corpus, cfg, mock_backend, max_concurrency=4))
    assert a == b and len(a) == 8
