"""Infer personas from raw text by asking who would read, write, like... it."""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Iterator

from .concurrency import ordered_map
from .errors import FatalBackendError, BackendError, MalformedResponse, TextTooLong
from .llm.base import Backend, Decoding
from .persona import FromText, Granularity, Persona, SourceText

log = logging.getLogger(__name__)

SPECIFIC = "as_specifically_as_possible"
COARSE = "coarse"

_GRANULARITY_TEXT = {
    SPECIFIC: (
        "Output persona descriptions as specifically as possible: one or two sentences naming the "
        "person's profession, expertise, interests or background."
    ),
    COARSE: "Output short, general persona descriptions of a few words each, such as a role or profession.",
}


@dataclass(frozen=True)
class T2PConfig:
    relation_words: tuple[str, ...] = ("read", "write")
    granularity_instruction: str = SPECIFIC
    max_personas_per_text: int = 3
    max_text_chars: int = 4000
    temperature: float = 1.0
    max_tokens: int = 512
    seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "relation_words", tuple(self.relation_words))
        if not self.relation_words:
            raise ValueError("relation_words must not be empty")
        if any(not w.strip() for w in self.relation_words):
            raise ValueError("relation words must be non-blank")
        if self.granularity_instruction not in _GRANULARITY_TEXT:
            raise ValueError(f"granularity_instruction must be one of {sorted(_GRANULARITY_TEXT)}")
        if self.max_personas_per_text < 1:
            raise ValueError("max_personas_per_text must be >= 1")
        if self.max_text_chars < 1:
            raise ValueError("max_text_chars must be >= 1")

    @property
    def granularity(self) -> Granularity:
        return Granularity.FINE if self.granularity_instruction == SPECIFIC else Granularity.COARSE

    @property
    def decoding(self) -> Decoding:
        return Decoding(temperature=self.temperature, max_tokens=self.max_tokens, seed=self.seed)


@dataclass(frozen=True)
class BackendRequest:
    """A fully rendered prompt plus decoding parameters, ready for ``Backend.complete``."""

    prompt: str
    decoding: Decoding
    meta: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SkipRecord:
    stage: str
    ref_id: str
    reason: str

    def to_dict(self) -> dict:
        return {"stage": self.stage, "ref_id": self.ref_id, "reason": self.reason}


def truncate_text(text: SourceText, max_chars: int) -> SourceText:
    if len(text.text) <= max_chars:
        return text
    return replace(text, text=text.text[:max_chars])


def build_t2p_prompt(text: SourceText, cfg: T2PConfig) -> BackendRequest:
    if not text.text.strip():
        raise ValueError(f"source text {text.id} is empty")
    if len(text.text) > cfg.max_text_chars:
        raise TextTooLong(f"text {text.id} has {len(text.text)} chars, budget is {cfg.max_text_chars}")
    questions = "\n".join(f"Who is likely to {w} the following text?" for w in cfg.relation_words)
    prompt = (
        f"{questions}\n\n"
        "[TEXT START]\n" + text.text + "\n[TEXT END]\n\n"
        f"Describe up to {cfg.max_personas_per_text} such people. "
        f"{_GRANULARITY_TEXT[cfg.granularity_instruction]}\n"
        'Answer with a JSON array of description strings and nothing else, for example ["a ...", "a ..."].'
    )
    return BackendRequest(prompt=prompt, decoding=cfg.decoding, meta={"text_id": text.id})


_FENCE = re.compile(r"^\s*```[\w-]*\s*\n?(.*?)\n?\s*```\s*$", re.DOTALL)


def strip_fences(raw: str) -> str:
    m = _FENCE.match(raw)
    return m.group(1) if m else raw.strip()


def load_json_reply(raw: str):
    body = strip_fences(raw)
    try:
        return json.loads(body)
    except json.JSONDecodeError:
        pass
    # tolerate chatter around a single array
    start, end = body.find("["), body.rfind("]")
    if 0 <= start < end:
        try:
            return json.loads(body[start : end + 1])
        except json.JSONDecodeError:
            pass
    raise MalformedResponse("reply is not valid JSON", raw)


def parse_persona_response(raw: str, text_id: str, cfg: T2PConfig, relation_word: str | None = None) -> list[Persona]:
    data = load_json_reply(raw)
    if not isinstance(data, list) or not all(isinstance(x, str) for x in data):
        raise MalformedResponse("expected a JSON array of strings", raw)
    word = relation_word or cfg.relation_words[0]
    out = []
    seen = set()
    for desc in data:
        desc = " ".join(desc.split())
        if not desc or desc in seen:
            continue
        seen.add(desc)
        out.append(Persona.create(desc, FromText(source_id=text_id, relation_word=word), cfg.granularity))
        if len(out) == cfg.max_personas_per_text:
            break
    return out


def personas_for_text(text: SourceText, cfg: T2PConfig, backend: Backend, on_skip) -> list[Persona]:
    text = truncate_text(text, cfg.max_text_chars)
    found = []
    for word in cfg.relation_words:
        single = replace(cfg, relation_words=(word,))
        req = build_t2p_prompt(text, single)
        try:
            raw = backend.complete(req.prompt, req.decoding).text
            try:
                personas = parse_persona_response(raw, text.id, single, word)
            except MalformedResponse:
                raw = backend.complete(req.prompt, req.decoding).text
                personas = parse_persona_response(raw, text.id, single, word)
        except FatalBackendError:
            raise
        except (MalformedResponse, BackendError) as exc:
            log.warning("text %s (%s): skipped: %s", text.id, word, exc)
            on_skip(SkipRecord("ingest", f"{text.id}#{word}", f"{type(exc).__name__}: {exc}"))
            continue
        found.extend(personas)
    return found


def run_text_to_persona(
    corpus: Iterable[SourceText],
    cfg: T2PConfig,
    backend: Backend,
    *,
    max_concurrency: int = 1,
    on_skip: Callable[[SkipRecord], None] | None = None,
) -> Iterator[Persona]:
    """Stream personas for every text; per-text failures are skipped, auth/config errors abort.

    One backend call is made per (text, relation word).  A malformed reply is
    retried once before the pair is skipped.
    """
    skip = on_skip or (lambda rec: None)
    for personas in ordered_map(lambda t: personas_for_text(t, cfg, backend, skip), corpus, max_concurrency):
        yield from personas
