"""Grow a persona collection through interpersonal relationships."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable

from .concurrency import ordered_map
from .errors import MalformedResponse
from .llm.base import Backend, Decoding
from .persona import DEFAULT_MAX_ITERATIONS, FromPersona, Persona, RelationEdge
from .text2persona import BackendRequest, load_json_reply

log = logging.getLogger(__name__)

DEFAULT_FANOUT_CAP = 5


def build_p2p_prompt(p: Persona, decoding: Decoding = Decoding(max_tokens=768)) -> BackendRequest:
    # description is concatenated, never passed through str.format, so braces survive
    prompt = (
        "Who is in close relationship with the given persona?\n\n"
        "[PERSONA START]\n" + p.description + "\n[PERSONA END]\n\n"
        "List people who have a close interpersonal relationship with this persona, for example "
        "patient-caregiver, assistance, family or co-worker relationships. For each one, name the "
        "relationship and describe the related person in one or two sentences, as specifically as possible.\n"
        'Answer with a JSON array of objects with keys "relation" and "description", and nothing else.'
    )
    return BackendRequest(prompt=prompt, decoding=decoding, meta={"persona_id": p.id})


def parse_relations(raw: str, parent: Persona, iteration: int) -> tuple[list[Persona], list[RelationEdge]]:
    if iteration < 1:
        raise ValueError("iteration must be >= 1")
    data = load_json_reply(raw)
    if not isinstance(data, list):
        raise MalformedResponse("expected a JSON array", raw)
    children, edges = [], []
    for obj in data:
        if not isinstance(obj, dict) or "relation" not in obj or "description" not in obj:
            raise MalformedResponse('each element needs "relation" and "description"', raw)
        label = " ".join(str(obj["relation"]).split())
        desc = " ".join(str(obj["description"]).split())
        if not label or not desc:
            raise MalformedResponse("empty relation or description", raw)
        child = Persona.create(desc, FromPersona(parent_id=parent.id, relation_label=label, depth=iteration),
                               parent.granularity)
        if child.id == parent.id:
            continue
        children.append(child)
        edges.append(RelationEdge(parent.id, child.id, label, iteration))
    return children, edges


@dataclass
class PersonaGraph:
    nodes: dict[str, Persona] = field(default_factory=dict)
    edges: list[RelationEdge] = field(default_factory=list)

    @property
    def max_iteration(self) -> int:
        return max((e.iteration for e in self.edges), default=0)

    def violations(self, max_iterations: int = DEFAULT_MAX_ITERATIONS) -> list[str]:
        out = []
        for e in self.edges:
            if e.parent_id not in self.nodes or e.child_id not in self.nodes:
                out.append(f"dangling edge {e.parent_id}->{e.child_id}")
            if e.iteration > max_iterations:
                out.append(f"edge {e.parent_id}->{e.child_id} at iteration {e.iteration}")
        if _has_cycle(self.edges):
            out.append("relation edges contain a cycle")
        return out


def _has_cycle(edges: Iterable[RelationEdge]) -> bool:
    adj: dict[str, list[str]] = {}
    for e in edges:
        adj.setdefault(e.parent_id, []).append(e.child_id)
    state: dict[str, int] = {}
    for root in adj:
        if state.get(root):
            continue
        stack = [(root, iter(adj.get(root, ())))]
        state[root] = 1
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                state[node] = 2
                stack.pop()
            elif state.get(nxt) == 1:
                return True
            elif not state.get(nxt):
                state[nxt] = 1
                stack.append((nxt, iter(adj.get(nxt, ()))))
    return False


def expand_graph(
    seeds: Iterable[Persona],
    backend: Backend,
    iterations: int = DEFAULT_MAX_ITERATIONS,
    fanout_cap: int = DEFAULT_FANOUT_CAP,
    *,
    max_concurrency: int = 1,
    decoding: Decoding = Decoding(max_tokens=768),
) -> PersonaGraph:
    """Breadth-first relationship expansion, one frontier per iteration.

    Children whose description exactly matches a node already in the graph are
    collapsed into it and not re-expanded; no edge is added for them, which
    keeps the graph acyclic.  Malformed replies drop that persona's children.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    if fanout_cap < 1:
        raise ValueError("fanout_cap must be >= 1")
    graph = PersonaGraph()
    seen_desc: set[str] = set()
    frontier = []
    for s in seeds:
        if s.description in seen_desc:
            continue
        seen_desc.add(s.description)
        graph.nodes[s.id] = s
        frontier.append(s)

    def expand_one(p: Persona, it: int):
        req = build_p2p_prompt(p, decoding)
        raw = backend.complete(req.prompt, req.decoding).text
        try:
            return parse_relations(raw, p, it)
        except MalformedResponse as exc:
            log.warning("persona %s: dropping children at iteration %d: %s", p.id, it, exc)
            return [], []

    for it in range(1, iterations + 1):
        if not frontier:
            break
        nxt = []
        results = ordered_map(lambda p: expand_one(p, it), frontier, max_concurrency)
        for children, edges in results:
            taken = 0
            for child, edge in zip(children, edges):
                if taken == fanout_cap:
                    break
                if child.description in seen_desc:
                    continue
                seen_desc.add(child.description)
                graph.nodes[child.id] = child
                graph.edges.append(edge)
                nxt.append(child)
                taken += 1
        frontier = nxt
    return graph
