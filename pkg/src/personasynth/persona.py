"""Domain records shared by every stage: sources, personas, relation edges, items.

All records are frozen dataclasses and round-trip through plain dicts
(``to_dict`` / ``from_dict``) so they can live in JSONL files.  Identifiers are
derived from content, which makes re-running a stage idempotent.
"""

from __future__ import annotations

import enum
import hashlib
import json
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Any, Mapping, Union

import numpy as np

MAX_DESCRIPTION_TOKENS = 150
DEFAULT_MAX_ITERATIONS = 6


def content_id(prefix: str, payload: Any, length: int = 16) -> str:
    blob = json.dumps(payload, sort_keys=True, ensure_ascii=False, separators=(",", ":"))
    return f"{prefix}_{hashlib.sha256(blob.encode('utf-8')).hexdigest()[:length]}"


class Granularity(str, enum.Enum):
    COARSE = "coarse"
    FINE = "fine"
    UNSPECIFIED = "unspecified"


@dataclass(frozen=True)
class SourceText:
    id: str
    text: str
    source_tag: str = ""
    lang: str = "en"

    def to_dict(self) -> dict:
        return {"id": self.id, "text": self.text, "source_tag": self.source_tag, "lang": self.lang}

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "SourceText":
        text = d["text"]
        if not isinstance(text, str) or not text.strip():
            raise ValueError("source text is empty")
        return cls(id=str(d["id"]), text=text, source_tag=d.get("source_tag", ""), lang=d.get("lang", "en"))


# --- provenance -----------------------------------------------------------


@dataclass(frozen=True)
class FromText:
    source_id: str
    relation_word: str

    kind = "from_text"

    def to_dict(self) -> dict:
        return {"kind": self.kind, "source_id": self.source_id, "relation_word": self.relation_word}


@dataclass(frozen=True)
class FromPersona:
    parent_id: str
    relation_label: str
    depth: int

    kind = "from_persona"

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "parent_id": self.parent_id,
            "relation_label": self.relation_label,
            "depth": self.depth,
        }


@dataclass(frozen=True)
class Manual:
    kind = "manual"

    def to_dict(self) -> dict:
        return {"kind": self.kind}


Provenance = Union[FromText, FromPersona, Manual]


def provenance_from_dict(d: Mapping[str, Any]) -> Provenance:
    kind = d.get("kind")
    if kind == "from_text":
        return FromText(source_id=str(d["source_id"]), relation_word=str(d["relation_word"]))
    if kind == "from_persona":
        return FromPersona(parent_id=str(d["parent_id"]), relation_label=str(d["relation_label"]), depth=int(d["depth"]))
    if kind == "manual":
        return Manual()
    raise ValueError(f"unknown provenance kind {kind!r}")


# --- sketches -------------------------------------------------------------


@dataclass(frozen=True)
class MinHashSignature:
    """Per-lane minima of a seeded 64-bit hash family over a token set."""

    values: tuple[int, ...]
    k: int
    seed: int

    def __post_init__(self):
        if len(self.values) != self.k:
            raise ValueError(f"signature has {len(self.values)} values, expected k={self.k}")

    @cached_property
    def array(self) -> np.ndarray:
        return np.array(self.values, dtype=np.uint64)

    @classmethod
    def from_array(cls, values: np.ndarray, seed: int) -> "MinHashSignature":
        return cls(values=tuple(int(v) for v in values), k=len(values), seed=seed)

    def to_dict(self) -> dict:
        return {"values": list(self.values), "k": self.k, "seed": self.seed}

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "MinHashSignature":
        return cls(values=tuple(int(v) for v in d["values"]), k=int(d["k"]), seed=int(d["seed"]))


# --- personas -------------------------------------------------------------


@dataclass(frozen=True)
class Persona:
    id: str
    description: str
    provenance: Provenance = field(default_factory=Manual)
    granularity: Granularity = Granularity.UNSPECIFIED
    embedding: tuple[float, ...] | None = None
    signature: MinHashSignature | None = None

    @classmethod
    def create(
        cls,
        description: str,
        provenance: Provenance | None = None,
        granularity: Granularity = Granularity.UNSPECIFIED,
    ) -> "Persona":
        provenance = provenance if provenance is not None else Manual()
        pid = content_id("p", {"description": description, "provenance": provenance.to_dict()})
        return cls(id=pid, description=description, provenance=provenance, granularity=granularity)

    @property
    def depth(self) -> int | None:
        return self.provenance.depth if isinstance(self.provenance, FromPersona) else None

    def with_embedding(self, vector) -> "Persona":
        return replace(self, embedding=tuple(float(x) for x in vector))

    def with_signature(self, signature: MinHashSignature | None) -> "Persona":
        return replace(self, signature=signature)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "description": self.description,
            "granularity": self.granularity.value,
            "provenance": self.provenance.to_dict(),
            "embedding": list(self.embedding) if self.embedding is not None else None,
            "signature": self.signature.to_dict() if self.signature is not None else None,
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "Persona":
        emb = d.get("embedding")
        sig = d.get("signature")
        return cls(
            id=str(d["id"]),
            description=d["description"],
            granularity=Granularity(d.get("granularity", "unspecified")),
            provenance=provenance_from_dict(d["provenance"]),
            embedding=tuple(float(x) for x in emb) if emb is not None else None,
            signature=MinHashSignature.from_dict(sig) if sig is not None else None,
        )


class Violation(str, enum.Enum):
    EMPTY_ID = "EmptyId"
    EMPTY_DESCRIPTION = "EmptyDescription"
    DESCRIPTION_TOO_LONG = "DescriptionTooLong"
    DEPTH_EXCEEDED = "DepthExceeded"
    DEPTH_BELOW_ONE = "DepthBelowOne"
    EMPTY_RELATION = "EmptyRelation"


def validate_persona(p: Persona, max_iterations: int = DEFAULT_MAX_ITERATIONS) -> list[Violation]:
    """Return every invariant the persona breaks; an empty list means valid."""
    out = []
    if not p.id:
        out.append(Violation.EMPTY_ID)
    if not p.description or not p.description.strip():
        out.append(Violation.EMPTY_DESCRIPTION)
    elif len(p.description.split()) > MAX_DESCRIPTION_TOKENS:
        out.append(Violation.DESCRIPTION_TOO_LONG)
    prov = p.provenance
    if isinstance(prov, FromPersona):
        if prov.depth < 1:
            out.append(Violation.DEPTH_BELOW_ONE)
        elif prov.depth > max_iterations:
            out.append(Violation.DEPTH_EXCEEDED)
        if not prov.relation_label.strip():
            out.append(Violation.EMPTY_RELATION)
    elif isinstance(prov, FromText) and not prov.relation_word.strip():
        out.append(Violation.EMPTY_RELATION)
    return out


@dataclass(frozen=True)
class RelationEdge:
    parent_id: str
    child_id: str
    relation_label: str
    iteration: int

    def __post_init__(self):
        if self.parent_id == self.child_id:
            raise ValueError("relation edge is a self-loop")
        if self.iteration < 1:
            raise ValueError("edge iteration must be >= 1")

    def to_dict(self) -> dict:
        return {
            "parent_id": self.parent_id,
            "child_id": self.child_id,
            "relation_label": self.relation_label,
            "iteration": self.iteration,
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "RelationEdge":
        return cls(str(d["parent_id"]), str(d["child_id"]), str(d["relation_label"]), int(d["iteration"]))


# --- synthesis records ----------------------------------------------------


class Scenario(str, enum.Enum):
    MATH = "math"
    MATH_FOCUS = "math_focus"
    MATH_DIFFICULTY = "math_difficulty"
    LOGIC = "logic"
    RUOZHIBA = "ruozhiba"
    INSTRUCTION = "instruction"
    KNOWLEDGE_TEXT = "knowledge_text"
    NPC = "npc"
    TOOL_SCHEMA = "tool_schema"
    TOOL_IMPL = "tool_impl"


@dataclass(frozen=True)
class Solution:
    producer: str
    answer: str
    full_text: str

    def to_dict(self) -> dict:
        return {"producer": self.producer, "answer": self.answer, "full_text": self.full_text}

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "Solution":
        return cls(producer=str(d["producer"]), answer=str(d["answer"]), full_text=str(d["full_text"]))


@dataclass(frozen=True)
class SynthesisItem:
    id: str
    scenario: Scenario
    persona_id: str
    prompt_text: str
    output_text: str
    solutions: tuple[Solution, ...] = ()
    meta: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        # frozen: normalise containers so equality and hashing are value-based
        object.__setattr__(self, "solutions", tuple(self.solutions))
        object.__setattr__(self, "meta", dict(sorted(self.meta.items())))

    def __hash__(self):
        return hash((self.id, self.scenario, self.persona_id, self.prompt_text, self.output_text,
                     self.solutions, tuple(self.meta.items())))

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "scenario": self.scenario.value,
            "persona_id": self.persona_id,
            "prompt_text": self.prompt_text,
            "output_text": self.output_text,
            "solutions": [s.to_dict() for s in self.solutions],
            "meta": dict(self.meta),
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "SynthesisItem":
        return cls(
            id=str(d["id"]),
            scenario=Scenario(d["scenario"]),
            persona_id=str(d["persona_id"]),
            prompt_text=d["prompt_text"],
            output_text=d["output_text"],
            solutions=tuple(Solution.from_dict(s) for s in d.get("solutions", [])),
            meta={str(k): str(v) for k, v in d.get("meta", {}).items()},
        )
