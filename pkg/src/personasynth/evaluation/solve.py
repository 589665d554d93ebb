"""Independent solutions from several producer configurations."""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, replace
from typing import Iterable, Iterator, Sequence

from ..concurrency import ordered_map
from ..errors import BackendError, FatalBackendError
from ..llm.base import GREEDY, Backend, Decoding
from ..persona import Solution, SynthesisItem
from .answers import extract_final_answer

log = logging.getLogger(__name__)

FAILED_KEY = "failed_producers"


class Strategy(str, enum.Enum):
    ASSISTANT = "assistant"
    POT = "pot"


@dataclass(frozen=True)
class Producer:
    label: str
    backend: Backend
    strategy: Strategy = Strategy.ASSISTANT
    decoding: Decoding = replace(GREEDY, max_tokens=2048)

    def __post_init__(self):
        if not self.label or "," in self.label:
            raise ValueError("producer label must be non-empty and contain no comma")
        object.__setattr__(self, "strategy", Strategy(self.strategy))


def problem_text(item: SynthesisItem) -> str:
    text = item.output_text.strip()
    for prefix in ("Math problem:", "Problem:"):
        if text.startswith(prefix):
            return text[len(prefix):].strip()
    return text


def solution_prompt(problem: str, strategy: Strategy) -> str:
    framed = f"[PROBLEM START]\n{problem}\n[PROBLEM END]"
    if Strategy(strategy) is Strategy.POT:
        return (
            "Write a Python program that computes the answer to the problem below. "
            "Show the program in a code block, then state its result on a final line of the form "
            "\"Answer: <value>\".\n\n" + framed
        )
    return (
        "You are a helpful assistant. Solve the problem below step by step and put the final answer "
        "in \\boxed{}.\n\n" + framed
    )


@dataclass(frozen=True)
class SolutionSet:
    item: SynthesisItem
    solutions: tuple[Solution, ...]
    failures: tuple[str, ...] = ()

    @property
    def attempted(self) -> int:
        return len(self.solutions) + len(self.failures)

    def to_item(self) -> SynthesisItem:
        meta = dict(self.item.meta)
        if self.failures:
            meta[FAILED_KEY] = ",".join(self.failures)
        else:
            meta.pop(FAILED_KEY, None)
        return replace(self.item, solutions=self.solutions, meta=meta)

    @classmethod
    def from_item(cls, item: SynthesisItem) -> "SolutionSet":
        failed = item.meta.get(FAILED_KEY, "")
        return cls(item=item, solutions=item.solutions, failures=tuple(f for f in failed.split(",") if f))


def _solve_one(item: SynthesisItem, producer: Producer) -> Solution | None:
    prompt = solution_prompt(problem_text(item), producer.strategy)
    try:
        text = producer.backend.complete(prompt, producer.decoding).text
    except FatalBackendError:
        raise
    except BackendError as exc:
        log.warning("item %s producer %s failed: %s", item.id, producer.label, exc)
        return None
    return Solution(producer=producer.label, answer=extract_final_answer(text) or "", full_text=text)


def solve_items(
    items: Iterable[SynthesisItem], producers: Sequence[Producer], *, max_concurrency: int = 1
) -> Iterator[SolutionSet]:
    """Every producer attempts every item; a failed attempt is recorded, not raised."""
    if not producers:
        raise ValueError("solve_items needs at least one producer")
    labels = [p.label for p in producers]
    if len(set(labels)) != len(labels):
        raise ValueError(f"producer labels must be unique: {labels}")
    width = max(1, min(max_concurrency, len(producers)))

    def work(item: SynthesisItem) -> SolutionSet:
        results = list(ordered_map(lambda p: _solve_one(item, p), producers, width))
        sols = tuple(s for s in results if s is not None)
        failed = tuple(p.label for p, s in zip(producers, results) if s is None)
        return SolutionSet(item=item, solutions=sols, failures=failed)

    yield from ordered_map(work, items, max_concurrency)
