"""Deterministic offline backend.

``mock_complete`` is a pure function of ``(prompt, seed)``.  It recognises the
prompt shapes this package produces (text-to-persona, persona-to-persona,
solution strategies, equality judging, tool implementation) and answers with
schema-valid output; anything else gets filler text tagged with a prompt hash.
"""

from __future__ import annotations

import hashlib
import json
import random
import re
from collections import Counter

from .base import Completion, Decoding, MockOptions

STOPWORDS = frozenset(
    """a an and are as at be been but by can could do does for from had has have how i if in into is it its
    just may more most must no not of on one or our out over should so some such than that the their them
    then there these they this those through to under up use used using very was we were what when where
    which while who whom why will with would you your about also each other only own same both any all few
    many much being after before between during above below again further once here following given text
    persona personas describe description descriptions output answer json array nothing else likely such
    person people please each sentences specifically possible""".split()
)

_WORD = re.compile(r"[^\W\d_]+(?:'[^\W\d_]+)?", re.UNICODE)

READER_ROLES = [
    "graduate student", "high school teacher", "software engineer", "research scientist",
    "retired engineer", "policy analyst", "science journalist", "undergraduate student",
    "data analyst", "librarian", "hobbyist", "product manager",
]
WRITER_ROLES = [
    "technical writer", "university professor", "industry researcher", "blogger",
    "textbook author", "journalist", "consultant", "curriculum designer",
]
OTHER_ROLES = [
    "community organizer", "small business owner", "parent", "nurse", "musician",
    "civil servant", "farmer", "shop assistant",
]
CLAUSES = ["interested in", "specializing in", "who studies", "who works on", "passionate about"]

RELATIONS = [
    ("patient-caregiver relationship", "a patient"),
    ("assistance relationship", "a person receiving help"),
    ("co-worker relationship", "a colleague"),
    ("family relationship", "a sibling"),
    ("mentor-mentee relationship", "an apprentice"),
    ("neighbor relationship", "a neighbor"),
    ("client relationship", "a client"),
    ("friendship", "a close friend"),
    ("teacher-student relationship", "a student"),
    ("supplier relationship", "a supplier"),
]
TRAITS = [
    "who is shy but curious", "who volunteers on weekends", "who recently moved to the city",
    "who is saving for university", "who loves old films", "who works night shifts",
    "who keeps a vegetable garden", "who is learning a second language", "who coaches a youth team",
    "who collects vintage radios",
]
SYLLABLES = ["ka", "lo", "mi", "ra", "ve", "su", "to", "ne", "di", "fa", "ko", "ri", "sa", "po", "le",
             "zu", "ha", "me", "ti", "jo"]


def _rng(prompt: str, seed: int | None, salt: str = "") -> random.Random:
    digest = hashlib.sha256(f"{seed}\x00{salt}\x00{prompt}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "little"))


def prompt_tag(prompt: str, seed: int | None = None) -> str:
    return hashlib.sha256(f"{seed}\x00{prompt}".encode()).hexdigest()[:10]


def keywords(text: str, n: int) -> list[str]:
    words = [w.lower() for w in _WORD.findall(text)]
    words = [w for w in words if len(w) > 2 and w not in STOPWORDS]
    counts = Counter(words)
    first = {}
    for i, w in enumerate(words):
        first.setdefault(w, i)
    ranked = sorted(counts, key=lambda w: (-counts[w], first[w]))
    return ranked[:n]


def _between(prompt: str, start: str, end: str) -> str | None:
    i = prompt.find(start)
    j = prompt.find(end, i + len(start)) if i >= 0 else -1
    if i < 0 or j < 0:
        return None
    return prompt[i + len(start) : j].strip()


def _name(rng: random.Random) -> str:
    return "".join(rng.choice(SYLLABLES) for _ in range(4)).capitalize()


def _article(word: str) -> str:
    return "an" if word[:1].lower() in "aeiou" else "a"


def _t2p(prompt: str, rng: random.Random, opts: MockOptions) -> str:
    text = _between(prompt, "[TEXT START]", "[TEXT END]") or ""
    relations = re.findall(r"Who is likely to (\w+) the following text\?", prompt)
    cap = re.search(r"up to (\d+)", prompt)
    n = min(opts.personas_per_call, int(cap.group(1))) if cap else opts.personas_per_call
    pool = {"read": READER_ROLES, "write": WRITER_ROLES}.get(relations[0] if relations else "", OTHER_ROLES)
    kws = keywords(text, 6) or ["everyday life"]
    roles = rng.sample(pool, k=min(n, len(pool)))
    coarse = "general persona descriptions" in prompt
    out = []
    for i, role in enumerate(roles):
        if coarse:
            out.append(f"{_article(role)} {role}")
            continue
        a = kws[i % len(kws)]
        b = kws[(i + 1) % len(kws)]
        topic = a if a == b else f"{a} and {b}"
        out.append(f"{_article(role)} {role} {rng.choice(CLAUSES)} {topic}")
    return json.dumps(out)


def _p2p(prompt: str, rng: random.Random, opts: MockOptions) -> str:
    parent = _between(prompt, "[PERSONA START]", "[PERSONA END]") or "someone"
    anchor = " ".join(parent.split()[:6]).rstrip(".,;")
    picks = rng.sample(RELATIONS, k=min(opts.relations_per_call, len(RELATIONS)))
    out = []
    for label, role in picks:
        out.append({
            "relation": label,
            "description": f"{role} named {_name(rng)} {rng.choice(TRAITS)}, connected to {anchor}",
        })
    return json.dumps(out)


def _answer_for(problem: str, seed: int | None, opts: MockOptions) -> int:
    base = int(hashlib.sha256(problem.encode()).hexdigest()[:8], 16) % 1000
    if opts.answer_noise > 0:
        r = _rng(problem, seed, "noise")
        if r.random() < opts.answer_noise:
            return base + 1 + r.randrange(5)
    return base


def _solution(prompt: str, seed: int | None, opts: MockOptions, pot: bool) -> str:
    problem = _between(prompt, "[PROBLEM START]", "[PROBLEM END]") or prompt
    ans = _answer_for(problem, seed, opts)
    if pot:
        return f"```python\ndef solve():\n    return {ans}\n\nprint(solve())\n```\nAnswer: {ans}"
    return f"Working through the problem step by step gives the result.\n\\boxed{{{ans}}}"


def _judge(prompt: str) -> str:
    m = re.findall(r"Expression 1:\s*(.*)\n\s*Expression 2:\s*(.*)", prompt)
    if not m:
        return "No"
    a, b = m[-1]
    return "Yes" if a.strip().lower() == b.strip().lower() else "No"


def _tool_impl(prompt: str) -> str:
    schema = _between(prompt, "[SCHEMA START]", "[SCHEMA END]") or ""
    name = "tool"
    params: list[str] = []
    try:
        spec = json.loads(schema)
        name = re.sub(r"\W", "_", str(spec.get("name", name))) or name
        params = list((spec.get("parameters") or {}).get("properties", {}).keys())
    except (ValueError, AttributeError):
        pass
    args = ", ".join(re.sub(r"\W", "_", p) for p in params)
    return (
        f"```python\ndef {name}({args}):\n"
        f'    """Stub implementation generated offline."""\n'
        f"    raise NotImplementedError({name!r})\n```"
    )


def _tool_schema(prompt: str, rng: random.Random) -> str:
    kws = keywords(prompt, 12)[-3:] or ["task"]
    name = "_".join(["get"] + kws[:2])
    spec = {
        "name": name,
        "description": f"Look up information about {' and '.join(kws)}.",
        "parameters": {
            "type": "object",
            "properties": {kws[0]: {"type": "string"}, "limit": {"type": "integer"}},
            "required": [kws[0]],
        },
    }
    return json.dumps(spec)


def _persona_hint(prompt: str) -> str:
    """The persona text inside a rendered synthesis prompt, when it can be located."""
    enhanced = prompt.rfind("\nPersona: ")
    if enhanced >= 0:
        return prompt[enhanced + len("\nPersona: "):].split("\n", 1)[0]
    m = re.search(r"persona[^\n]*:\s*\n+([^\n]+)", prompt, re.IGNORECASE)
    return m.group(1) if m else prompt


def _filler(prompt: str, seed: int | None, rng: random.Random) -> str:
    tag = prompt_tag(prompt, seed)
    kws = keywords(_persona_hint(prompt), 6) or ["things"]
    rng.shuffle(kws)
    if "math problem" in prompt.lower():
        n = rng.randrange(2, 50)
        return (
            f"[{tag}] A question about {', '.join(kws[:-1])} and {kws[-1]}: "
            f"if {n} items are split evenly among {rng.randrange(2, 9)} groups, how many are left over?"
        )
    return f"[{tag}] Notes on {', '.join(kws)}."


def mock_complete(prompt: str, seed: int | None = None, options: MockOptions | None = None) -> str:
    opts = options or MockOptions()
    rng = _rng(prompt, seed)
    if "Who is likely to" in prompt and "[TEXT START]" in prompt:
        return _t2p(prompt, rng, opts)
    if "close relationship with the given persona" in prompt:
        return _p2p(prompt, rng, opts)
    if "Expression 1:" in prompt and "Expression 2:" in prompt:
        return _judge(prompt)
    if "[PROBLEM START]" in prompt:
        return _solution(prompt, seed, opts, pot="Python program" in prompt)
    if "[SCHEMA START]" in prompt:
        return _tool_impl(prompt)
    if "interface definition" in prompt.lower():
        return _tool_schema(prompt, rng)
    return _filler(prompt, seed, rng)


class MockTransport:
    def __init__(self, options: MockOptions | None = None, producer: str = "mock"):
        self.options = options or MockOptions()
        self.producer = producer

    def send(self, prompt: str, decoding: Decoding) -> Completion:
        text = mock_complete(prompt, decoding.seed, self.options)
        return Completion(
            text=text,
            producer=self.producer,
            usage={"prompt_tokens": len(prompt.split()), "completion_tokens": len(text.split())},
        )
