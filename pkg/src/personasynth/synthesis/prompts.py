"""Scenario templates and the three prompting modes.

Templates are plain UTF-8 files with a small header and a body using
``{slot}`` placeholders (``{{`` / ``}}`` for literal braces)::

    label: Math problem
    clause.focus: The problem must focus on {focus}.
    ---
    Create a math problem related to the following persona:
    {persona}
    {focus}...

``{persona}`` is always filled from the PromptSpec persona.  A slot declared as a
``clause.<name>`` is optional: it renders as the clause text when the modifier
is supplied and as nothing otherwise.  Every other slot is a required modifier.
A ``<scenario>.<variant>.txt`` file is selected with the ``variant`` modifier.
"""

from __future__ import annotations

import enum
import os
import string
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

from ..errors import DemoPersonaMissing, InvalidPromptSpec, MissingModifier, UnknownScenario
from ..llm.base import Decoding
from ..persona import Persona

SCENARIOS = ("math", "logic", "ruozhiba", "instruction", "knowledge_text", "npc", "tool_schema", "tool_impl")
# item-level scenario labels that render through the math template with one modifier required
ALIASES = {"math_focus": ("math", "focus"), "math_difficulty": ("math", "difficulty")}
RESERVED_SLOTS = {"persona"}


class Mode(str, enum.Enum):
    ZERO_SHOT = "zero_shot"
    FEW_SHOT = "few_shot"
    PERSONA_ENHANCED = "persona_enhanced_few_shot"


@dataclass(frozen=True)
class Demo:
    content: str
    demo_persona: Persona | None = None

    def __post_init__(self):
        if not self.content or not self.content.strip():
            raise ValueError("demo content must be non-empty")

    def to_dict(self) -> dict:
        return {"content": self.content, "demo_persona": self.demo_persona.to_dict() if self.demo_persona else None}

    @classmethod
    def from_dict(cls, d: Mapping) -> "Demo":
        dp = d.get("demo_persona")
        return cls(content=d["content"], demo_persona=Persona.from_dict(dp) if dp else None)


@dataclass(frozen=True)
class PromptSpec:
    mode: Mode
    persona: Persona
    scenario: str
    modifiers: Mapping[str, str] = field(default_factory=dict)
    demos: tuple[Demo, ...] = ()
    decoding: Decoding = field(default_factory=Decoding)

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "demos", tuple(self.demos))
        object.__setattr__(self, "modifiers", dict(self.modifiers))


@dataclass(frozen=True)
class Template:
    scenario: str
    body: str
    label: str
    clauses: Mapping[str, str]
    variant: str | None = None

    @property
    def slots(self) -> list[str]:
        return _fields(self.body)

    @property
    def required_modifiers(self) -> list[str]:
        return [s for s in self.slots if s not in RESERVED_SLOTS and s not in self.clauses]

    @classmethod
    def parse(cls, scenario: str, text: str, variant: str | None = None) -> "Template":
        head, sep, body = text.partition("\n---\n")
        if not sep:
            head, body = "", text
        label, clauses = scenario.replace("_", " ").capitalize(), {}
        for line in head.splitlines():
            if not line.strip():
                continue
            key, colon, value = line.partition(":")
            if not colon:
                raise ValueError(f"template {scenario}: bad header line {line!r}")
            key, value = key.strip(), value.strip()
            if key == "label":
                label = value
            elif key.startswith("clause."):
                clauses[key[len("clause."):]] = value
            else:
                raise ValueError(f"template {scenario}: unknown header key {key!r}")
        return cls(scenario=scenario, body=body.strip("\n") + "\n", label=label, clauses=clauses, variant=variant)


def _fields(text: str) -> list[str]:
    out = []
    for _, name, spec, conv in string.Formatter().parse(text):
        if name is None:
            continue
        if not name.isidentifier() or spec or conv:
            raise ValueError(f"unsupported placeholder {{{name}}}")
        if name not in out:
            out.append(name)
    return out


def _substitute(text: str, values: Mapping[str, str]) -> str:
    parts = []
    for literal, name, _, _ in string.Formatter().parse(text):
        parts.append(literal)
        if name is not None:
            parts.append(values[name])
    return "".join(parts)


class TemplateRegistry:
    """Loads scenario templates from the bundled directory or a user directory."""

    def __init__(self, directory: str | os.PathLike | None = None):
        self._templates: dict[tuple[str, str | None], Template] = {}
        if directory is None:
            root = resources.files("personasynth.synthesis") / "templates"
            files = [(f.name, f.read_text(encoding="utf-8")) for f in root.iterdir() if f.name.endswith(".txt")]
        else:
            files = [(p.name, p.read_text(encoding="utf-8")) for p in Path(directory).glob("*.txt")]
        for name, text in sorted(files):
            stem = name[: -len(".txt")]
            scenario, _, variant = stem.partition(".")
            self._templates[(scenario, variant or None)] = Template.parse(scenario, text, variant or None)

    def list(self) -> list[str]:
        return sorted({s for s, v in self._templates if v is None})

    def variants(self, scenario: str) -> list[str]:
        return sorted(v for s, v in self._templates if s == scenario and v is not None)

    def get(self, scenario: str, variant: str | None = None) -> Template:
        try:
            return self._templates[(scenario, variant)]
        except KeyError:
            what = f"{scenario}.{variant}" if variant else scenario
            raise UnknownScenario(f"no template for {what!r}; known: {self.list()}") from None


_DEFAULT_REGISTRY: TemplateRegistry | None = None


def default_registry() -> TemplateRegistry:
    global _DEFAULT_REGISTRY
    if _DEFAULT_REGISTRY is None:
        _DEFAULT_REGISTRY = TemplateRegistry()
    return _DEFAULT_REGISTRY


def resolve_scenario(scenario: str, modifiers: Mapping[str, str]) -> tuple[str, list[str]]:
    """Map an item-level scenario label to ``(template scenario, extra required modifiers)``."""
    if scenario in ALIASES:
        base, needed = ALIASES[scenario]
        return base, [needed]
    return scenario, []


def item_scenario(template_scenario: str, modifiers: Mapping[str, str]) -> str:
    """The label recorded on generated items (math prompts with a focus/difficulty get their own)."""
    if template_scenario == "math":
        if modifiers.get("focus"):
            return "math_focus"
        if modifiers.get("difficulty"):
            return "math_difficulty"
    return template_scenario


def render_body(template: Template, persona: Persona, modifiers: Mapping[str, str]) -> str:
    values = {"persona": persona.description}
    for slot in template.slots:
        if slot in RESERVED_SLOTS:
            continue
        if slot in template.clauses:
            val = modifiers.get(slot)
            values[slot] = _substitute(template.clauses[slot], {slot: val}) + "\n" if val else ""
        elif slot in modifiers:
            values[slot] = modifiers[slot]
        else:
            raise MissingModifier(f"scenario {template.scenario!r} needs modifier {slot!r}")
    return _substitute(template.body, values)


def render_prompt(spec: PromptSpec, registry: TemplateRegistry | None = None) -> str:
    registry = registry or default_registry()
    scenario, needed = resolve_scenario(spec.scenario, spec.modifiers)
    for m in needed:
        if not spec.modifiers.get(m):
            raise MissingModifier(f"scenario {spec.scenario!r} needs modifier {m!r}")
    template = registry.get(scenario, spec.modifiers.get("variant") or None)
    if spec.mode is Mode.ZERO_SHOT and spec.demos:
        raise InvalidPromptSpec("zero_shot prompts take no demos")
    if spec.mode is not Mode.ZERO_SHOT and not spec.demos:
        raise InvalidPromptSpec(f"{spec.mode.value} prompts need at least one demo")
    if spec.mode is Mode.PERSONA_ENHANCED:
        for i, d in enumerate(spec.demos, start=1):
            if d.demo_persona is None:
                raise DemoPersonaMissing(f"demo {i} has no persona")
    body = render_body(template, spec.persona, spec.modifiers)

    if spec.mode is Mode.ZERO_SHOT:
        return body
    if spec.mode is Mode.FEW_SHOT:
        shots = "\n\n".join(f"Example {i}:\n{d.content.strip()}" for i, d in enumerate(spec.demos, start=1))
        return f"Here are some examples of the expected output:\n\n{shots}\n\n{body}"
    pairs = "\n\n".join(
        f"Persona: {d.demo_persona.description}\n{template.label}: {d.content.strip()}" for d in spec.demos
    )
    return (
        f"{body}\n"
        f"The examples below pair a persona with a {template.label.lower()} created for it. "
        f"Complete the last one.\n\n{pairs}\n\nPersona: {spec.persona.description}\n{template.label}:"
    )


def list_scenarios(registry: TemplateRegistry | None = None) -> list[str]:
    return (registry or default_registry()).list()


def demos_from_texts(texts: Sequence[str]) -> tuple[Demo, ...]:
    return tuple(Demo(t) for t in texts)
