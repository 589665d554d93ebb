"""Final-answer extraction and two-tier answer equality (normalized string match, then a judge)."""

from __future__ import annotations

import logging
import re
import threading
from fractions import Fraction

from ..errors import BackendError, JudgeUnavailable
from ..llm.base import GREEDY, Backend, Decoding

log = logging.getLogger(__name__)


def _balanced_group(text: str, open_idx: int) -> tuple[str, int] | None:
    """Content of the ``{...}`` group opening at ``open_idx`` and the index after it."""
    depth = 0
    for i in range(open_idx, len(text)):
        c = text[i]
        if c == "{":
            depth += 1
        elif c == "}":
            depth -= 1
            if depth == 0:
                return text[open_idx + 1 : i], i + 1
    return None


def last_boxed(text: str) -> str | None:
    found = None
    for m in re.finditer(r"\\(?:boxed|fbox)\s*\{", text):
        group = _balanced_group(text, m.end() - 1)
        if group is not None:
            found = group[0]
    return found


_NUMBER = re.compile(r"[-+]?(?:\d[\d,]*(?:\.\d+)?|\.\d+)(?:\s*/\s*[-+]?\d+(?:\.\d+)?)?")
_ANSWER_TAG = re.compile(r"\banswer\s*(?:is\s*[:=]?|[:=])", re.IGNORECASE)


def extract_final_answer(text: str) -> str | None:
    """Last ``\\boxed{}`` if present, else the last number (or expression) on the final line."""
    if not text or not text.strip():
        return None
    boxed = last_boxed(text)
    if boxed is not None:
        return boxed.strip()
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip() and not ln.strip().startswith("```")]
    if not lines:
        return None
    line = lines[-1]
    tags = list(_ANSWER_TAG.finditer(line))
    if tags:
        tail = line[tags[-1].end():].strip().rstrip(".").strip()
        if tail:
            return tail
    numbers = _NUMBER.findall(line)
    if numbers:
        return numbers[-1].strip()
    return line.rstrip(".").strip() or None


_SPACING = re.compile(r"\\(?:left|right|displaystyle)\b|\\[!,;:> ]|\\q?quad\b")
_TEXT_WRAP = re.compile(r"\\(?:text|textbf|mathrm|mathbf|mbox)\s*\{([^{}]*)\}")
_SHORT_FRAC = re.compile(r"\\frac(\d)(\d)")
_THOUSANDS = re.compile(r"(?<![\d.])(\d{1,3}(?:,\d{3})+)(?![\d,])")
_RATIONAL = re.compile(r"[-+]?(?:\d+(?:\.\d*)?|\.\d+)(?:/[-+]?(?:\d+(?:\.\d*)?|\.\d+))?")


def _replace_fracs(s: str) -> str:
    out = []
    i = 0
    while True:
        j = s.find("\\frac", i)
        if j < 0:
            out.append(s[i:])
            return "".join(out)
        out.append(s[i:j])
        k = j + len("\\frac")
        while k < len(s) and s[k] == " ":
            k += 1
        num = _balanced_group(s, k) if k < len(s) and s[k] == "{" else None
        den = _balanced_group(s, num[1]) if num and num[1] < len(s) and s[num[1]] == "{" else None
        if not (num and den):
            out.append("\\frac")
            i = j + len("\\frac")
            continue
        a, b = _replace_fracs(num[0]), _replace_fracs(den[0])
        wrap = lambda x: x if re.fullmatch(r"[-+]?[\w.]+", x) else f"({x})"
        out.append(f"{wrap(a)}/{wrap(b)}")
        i = den[1]


def _canonical_rational(s: str) -> str | None:
    if not _RATIONAL.fullmatch(s):
        return None
    num, _, den = s.partition("/")
    try:
        value = Fraction(num) / Fraction(den) if den else Fraction(num)
    except (ZeroDivisionError, ValueError):
        return None
    return str(value)


def normalize_answer(ans: str) -> str:
    """Canonical string form: exact rationals collapse to ``p/q`` or an integer."""
    s = ans.strip()
    s = s.replace("$", "")
    whole = re.fullmatch(r"\s*\\(?:boxed|fbox)\s*(\{.*\})\s*", s, re.DOTALL)
    if whole:
        group = _balanced_group(whole.group(1), 0)
        if group and group[1] == len(whole.group(1)):
            s = group[0]
    s = _SPACING.sub("", s)
    s = s.replace("\\dfrac", "\\frac").replace("\\tfrac", "\\frac")
    s = _SHORT_FRAC.sub(r"\\frac{\1}{\2}", s)
    prev = None
    while prev != s:
        prev, s = s, _TEXT_WRAP.sub(r"\1", s)
    s = _replace_fracs(s)
    s = s.lower()
    s = re.sub(r"\s+", "", s)
    s = s.rstrip(".")
    s = _THOUSANDS.sub(lambda m: m.group(1).replace(",", ""), s)
    s = re.sub(r"^[a-z]=", "", s)
    s = re.sub(r"^\((.*)\)$", lambda m: m.group(1) if _RATIONAL.fullmatch(m.group(1)) else m.group(0), s)
    rational = _canonical_rational(s)
    return rational if rational is not None else s


def fast_equal(expected: str, got: str) -> bool:
    return normalize_answer(expected) == normalize_answer(got)


def judge_prompt(expected: str, got: str) -> str:
    # single-line operands keep the final two lines parseable
    e, g = " ".join(expected.split()), " ".join(got.split())
    return (
        "Decide whether the two mathematical expressions below denote the same final answer. "
        "Allow only trivial rewriting, such as reordering terms, changing fraction or decimal notation, "
        "or dropping units and formatting. Do not solve anything.\n"
        "Reply with exactly one word: Yes or No.\n\n"
        f"Expression 1: {e}\nExpression 2: {g}"
    )


def parse_judgement(reply: str) -> bool | None:
    m = re.match(r"\W*(yes|no)\b", reply.strip(), re.IGNORECASE)
    if not m:
        return None
    return m.group(1).lower() == "yes"


class EqualityChecker:
    """Fast normalized match first; unresolved pairs go to an optional judge backend.

    Judge decisions are cached per ``(expected, got)``.  When the judge fails and
    ``fallback_on_unavailable`` is set, the fast-path verdict is returned and the
    pair is counted in ``flagged``; otherwise ``JudgeUnavailable`` propagates.
    """

    def __init__(self, judge: Backend | None = None, *, decoding: Decoding = GREEDY, fallback_on_unavailable=False):
        self.judge = judge
        self.decoding = decoding
        self.fallback_on_unavailable = fallback_on_unavailable
        self._cache: dict[tuple[str, str], bool] = {}
        self._lock = threading.Lock()
        self.flagged: list[tuple[str, str]] = []
        self.judge_calls = 0

    def _ask_judge(self, expected: str, got: str) -> bool:
        key = (expected, got)
        with self._lock:
            if key in self._cache:
                return self._cache[key]
        try:
            reply = self.judge.complete(judge_prompt(expected, got), self.decoding).text
        except BackendError as exc:
            raise JudgeUnavailable(f"judge call failed: {exc}") from exc
        verdict = parse_judgement(reply)
        if verdict is None:
            raise JudgeUnavailable(f"judge reply is not yes/no: {reply[:80]!r}")
        with self._lock:
            self.judge_calls += 1
            self._cache.setdefault(key, verdict)
            return self._cache[key]

    def __call__(self, expected: str, got: str) -> bool:
        if fast_equal(expected, got):
            return True
        if self.judge is None:
            return False
        try:
            return self._ask_judge(expected, got)
        except JudgeUnavailable:
            if not self.fallback_on_unavailable:
                raise
            log.warning("judge unavailable for (%r, %r); using fast path", expected, got)
            with self._lock:
                self.flagged.append((expected, got))
            return False


def check_answer_equality(expected: str, got: str, judge: Backend | EqualityChecker | None = None) -> bool:
    if isinstance(judge, EqualityChecker):
        return judge(expected, got)
    return EqualityChecker(judge)(expected, got)
