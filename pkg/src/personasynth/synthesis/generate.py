from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from ..concurrency import ordered_map
from ..errors import BackendError, FatalBackendError, MalformedResponse
from ..llm.base import Backend, Decoding
from ..persona import Manual, Persona, Scenario, SourceText, SynthesisItem, content_id
from ..text2persona import SkipRecord, T2PConfig, personas_for_text
from .prompts import Demo, Mode, PromptSpec, TemplateRegistry, item_scenario, render_prompt, resolve_scenario

log = logging.getLogger(__name__)

SYNTHESIS_DECODING = Decoding(temperature=1.0, max_tokens=1024)


@dataclass(frozen=True)
class SynthesisJob:
    """Everything in a PromptSpec except the persona."""

    scenario: str
    mode: Mode = Mode.ZERO_SHOT
    modifiers: Mapping[str, str] = field(default_factory=dict)
    demos: tuple[Demo, ...] = ()
    decoding: Decoding = SYNTHESIS_DECODING

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "modifiers", dict(self.modifiers))
        object.__setattr__(self, "demos", tuple(self.demos))

    def for_persona(self, persona: Persona, repetition: int = 0) -> PromptSpec:
        decoding = self.decoding
        if decoding.seed is not None and repetition:
            decoding = replace(decoding, seed=decoding.seed + repetition)
        return PromptSpec(self.mode, persona, self.scenario, self.modifiers, self.demos, decoding)


def item_id(scenario: str, persona_id: str, prompt: str, repetition: int) -> str:
    return content_id("s", {"scenario": scenario, "persona_id": persona_id, "prompt": prompt, "rep": repetition})


def _make_item(spec: PromptSpec, repetition: int, backend: Backend, registry) -> SynthesisItem | None:
    prompt = render_prompt(spec, registry)
    completion = backend.complete(prompt, spec.decoding)
    text = completion.text.strip()
    if not text:
        raise MalformedResponse("empty completion")
    base, _ = resolve_scenario(spec.scenario, spec.modifiers)
    label = item_scenario(base, spec.modifiers) if spec.scenario == base else spec.scenario
    meta = {
        "mode": spec.mode.value,
        "template": base,
        "repetition": str(repetition),
        "producer": completion.producer,
        "persona_description": spec.persona.description,
    }
    meta.update({f"modifier.{k}": v for k, v in spec.modifiers.items()})
    return SynthesisItem(
        id=item_id(label, spec.persona.id, prompt, repetition),
        scenario=Scenario(label),
        persona_id=spec.persona.id,
        prompt_text=prompt,
        output_text=text,
        meta=meta,
    )


def synthesize(
    personas: Iterable[Persona],
    job: SynthesisJob,
    backend: Backend,
    n_per_persona: int = 1,
    *,
    registry: TemplateRegistry | None = None,
    max_concurrency: int = 1,
    on_skip: Callable[[SkipRecord], None] | None = None,
) -> Iterator[SynthesisItem]:
    """One item per (persona, repetition), in input order.  Failed items are skipped and logged."""
    if n_per_persona < 1:
        raise ValueError("n_per_persona must be >= 1")
    skip = on_skip or (lambda rec: None)

    def work(arg):
        persona, rep = arg
        try:
            return _make_item(job.for_persona(persona, rep), rep, backend, registry)
        except FatalBackendError:
            raise
        except (BackendError, MalformedResponse) as exc:
            log.warning("persona %s rep %d: skipped: %s", persona.id, rep, exc)
            skip(SkipRecord("synthesize", f"{persona.id}#{rep}", f"{type(exc).__name__}: {exc}"))
            return None

    tasks = ((p, rep) for p in personas for rep in range(n_per_persona))
    for item in ordered_map(work, tasks, max_concurrency):
        if item is not None:
            yield item


def derive_demo_personas(
    demos: Sequence[str],
    backend: Backend,
    cfg: T2PConfig | None = None,
    on_skip: Callable[[SkipRecord], None] | None = None,
) -> list[Demo]:
    """Pair each demonstration with a persona inferred from it (Text-to-Persona on the demo)."""
    if not demos:
        raise ValueError("derive_demo_personas needs at least one demo")
    cfg = cfg or T2PConfig(relation_words=("write",), max_personas_per_text=1)
    out = []
    for i, text in enumerate(demos):
        src = SourceText(id=content_id("demo", text), text=text, source_tag="demo")
        skipped: list[SkipRecord] = []
        personas = personas_for_text(src, cfg, backend, skipped.append)
        if not personas and not skipped:
            skipped.append(SkipRecord("demo_personas", src.id, "no persona in reply"))
        for rec in skipped:
            if on_skip:
                on_skip(rec)
        if not personas:
            log.warning("demo %d dropped: no persona inferred", i)
            continue
        out.append(Demo(content=text, demo_persona=personas[0]))
    return out


def convert_tool_schema_to_impl(
    schema_item: SynthesisItem,
    backend: Backend,
    persona: Persona | None = None,
    *,
    registry: TemplateRegistry | None = None,
    decoding: Decoding = SYNTHESIS_DECODING,
) -> SynthesisItem:
    if schema_item.scenario is not Scenario.TOOL_SCHEMA:
        raise ValueError(f"expected a tool_schema item, got {schema_item.scenario.value}")
    if persona is None:
        desc = schema_item.meta.get("persona_description", "")
        if not desc:
            raise ValueError("schema item lacks persona_description; pass the persona explicitly")
        persona = Persona(id=schema_item.persona_id, description=desc, provenance=Manual())
    spec = PromptSpec(Mode.ZERO_SHOT, persona, "tool_impl", {"schema": schema_item.output_text}, (), decoding)
    item = _make_item(spec, 0, backend, registry)
    meta = dict(item.meta)
    meta["schema_item_id"] = schema_item.id
    meta.pop("modifier.schema", None)
    return replace(item, meta=meta)
