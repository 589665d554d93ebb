"""Keep a test item only when enough independent solutions agree on its final answer."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence

from ..persona import Solution, SynthesisItem
from .answers import fast_equal
from .solve import SolutionSet

Equality = Callable[[str, str], bool]


def _canonical_order(solutions: Iterable[Solution], producer_order: Sequence[str]) -> list[Solution]:
    rank = {label: i for i, label in enumerate(producer_order)}
    return sorted(solutions, key=lambda s: (rank.get(s.producer, len(rank)), s.producer, s.answer, s.full_text))


def answer_classes(
    solutions: Iterable[Solution], equality: Equality = fast_equal, producer_order: Sequence[str] = ()
) -> list[list[Solution]]:
    """Group solutions whose answers match the class's first member.

    Solutions are visited in a canonical order (producer rank, then label), so the
    grouping does not depend on the order they were supplied in, and each class's
    first member is its lowest-ranked producer.  Empty answers never join a class.
    """
    classes: list[list[Solution]] = []
    for sol in _canonical_order(solutions, producer_order):
        if not sol.answer.strip():
            continue
        for cls in classes:
            if equality(cls[0].answer, sol.answer):
                cls.append(sol)
                break
        else:
            classes.append([sol])
    return classes


@dataclass(frozen=True)
class ConsensusDecision:
    item_id: str
    retained: bool
    reason: str
    reference: Solution | None = None
    agreement: int = 0
    attempted: int = 0


@dataclass
class ConsensusResult:
    retained: list[SynthesisItem] = field(default_factory=list)
    decisions: list[ConsensusDecision] = field(default_factory=list)

    @property
    def retention_rate(self) -> float:
        return len(self.retained) / len(self.decisions) if self.decisions else 0.0


def decide(
    sset: SolutionSet, equality: Equality = fast_equal, min_agree: int = 2, producer_order: Sequence[str] = ()
) -> ConsensusDecision:
    if sset.attempted < min_agree:
        raise ValueError(f"item {sset.item.id}: {sset.attempted} solutions attempted, need >= {min_agree}")
    classes = answer_classes(sset.solutions, equality, producer_order)
    sizes = sorted((len(c) for c in classes), reverse=True)
    top = sizes[0] if sizes else 0
    if top < min_agree:
        return ConsensusDecision(sset.item.id, False, "no agreement", None, top, sset.attempted)
    if sizes.count(top) > 1:
        return ConsensusDecision(sset.item.id, False, "tied classes", None, top, sset.attempted)
    winner = next(c for c in classes if len(c) == top)
    return ConsensusDecision(sset.item.id, True, "agreement", winner[0], top, sset.attempted)


def consensus_filter(
    sets: Iterable[SolutionSet],
    equality: Equality = fast_equal,
    min_agree: int = 2,
    producer_order: Sequence[str] | None = None,
) -> ConsensusResult:
    """Retained items carry ``reference_answer``, ``reference_producer`` and ``agreement`` in meta."""
    if min_agree < 1:
        raise ValueError("min_agree must be >= 1")
    result = ConsensusResult()
    for sset in sets:
        order = producer_order if producer_order is not None else ()
        d = decide(sset, equality, min_agree, order)
        result.decisions.append(d)
        if d.retained:
            item = sset.to_item()
            meta = dict(item.meta)
            meta.update(
                reference_answer=d.reference.answer,
                reference_producer=d.reference.producer,
                agreement=f"{d.agreement}/{d.attempted}",
            )
            result.retained.append(replace(item, meta=meta))
    return result
