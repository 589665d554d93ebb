from decimal import Decimal

import pytest
from hypothesis import given, strategies as st

from equality_table import EQUALITY_TABLE, JUDGE_CASES
from oracles import rational_value
from personasynth.errors import BackendError, JudgeUnavailable
from personasynth.evaluation import (
    EqualityChecker,
    check_answer_equality,
    extract_final_answer,
    fast_equal,
    judge_prompt,
    normalize_answer,
)
from personasynth.evaluation.answers import last_boxed, parse_judgement


@pytest.mark.parametrize("text, answer", [
    ("so \\boxed{\\frac{1}{2}} then finally \\boxed{3}", "3"),
    ("nested \\boxed{\\frac{1}{\\sqrt{2}}}", "\\frac{1}{\\sqrt{2}}"),
    ("Work...\nThe answer is 7.", "7"),
    ("Work...\nThe answer is x+1", "x+1"),
    ("```\nprint(5)\n```\nAnswer: 12", "12"),
    ("we get 3 apples and 4 pears", "4"),
    ("no digits here\nblue", "blue"),
    ("", None),
])
def test_extract_final_answer(text, answer):
    assert extract_final_answer(text) == answer


def test_unbalanced_box_is_ignored():
    assert last_boxed("\\boxed{3") is None


@pytest.mark.parametrize("expected, got, equal, rational", EQUALITY_TABLE)
def test_equality_table(expected, got, equal, rational):
    assert fast_equal(expected, got) is equal
    if rational:
        a, b = rational_value(expected), rational_value(got)
        assert a is not None and b is not None
        assert (a == b) is equal


def test_table_size():
    assert len(EQUALITY_TABLE) == 30


answers = st.one_of(
    st.fractions(max_denominator=50).map(str),
    st.decimals(allow_nan=False, allow_infinity=False, places=3).map(str),
    st.text("abcx+-*/^()0123456789 ", max_size=12),
)


@given(answers)
def test_fast_equal_reflexive(a):
    assert fast_equal(a, a)


@given(answers, answers)
def test_fast_equal_symmetric(a, b):
    assert fast_equal(a, b) == fast_equal(b, a)


@given(answers)
def test_normalize_idempotent(a):
    n = normalize_answer(a)
    assert normalize_answer(n) == n


@given(st.fractions(min_value=-10**6, max_value=10**6, max_denominator=200))
def test_fraction_latex_and_decimal_forms_agree(q):
    frac = f"{q.numerator}/{q.denominator}"
    if q.numerator >= 0:
        assert fast_equal(frac, f"\\frac{{{q.numerator}}}{{{q.denominator}}}")
    d = q.denominator
    for p in (2, 5):
        while d % p == 0:
            d //= p
    if d == 1:  # terminating decimal
        assert fast_equal(frac, str(Decimal(q.numerator) / Decimal(q.denominator)))


def test_parse_judgement():
    assert parse_judgement("Yes.") is True
    assert parse_judgement("  no, they differ") is False
    assert parse_judgement("maybe") is None


def test_judge_prompt_layout():
    p = judge_prompt("a\nb", "c")
    assert p.endswith("Expression 1: a b\nExpression 2: c")


def test_judge_is_called_only_when_fast_path_fails_and_cached(scripted):
    backend, t = scripted(lambda p, d: "Yes")
    eq = EqualityChecker(backend)
    assert eq("0.5", "1/2") and t.prompts == []
    assert eq("x+1", "1+x") and eq("x+1", "1+x")
    assert len(t.prompts) == 1 and eq.judge_calls == 1


def test_judge_failure_raises_or_flags(scripted):
    def down(p, d):
        raise BackendError("offline")

    backend, _ = scripted(down, attempts=1)
    with pytest.raises(JudgeUnavailable):
        EqualityChecker(backend)("x+1", "1+x")
    eq = EqualityChecker(backend, fallback_on_unavailable=True)
    assert eq("x+1", "1+x") is False and eq.flagged == [("x+1", "1+x")]
    garbled, _ = scripted(lambda p, d: "I think so")
    with pytest.raises(JudgeUnavailable):
        EqualityChecker(garbled)("x+1", "1+x")


def test_no_judge_means_fast_path_only():
    assert check_answer_equality("0.5", "1/2") and not check_answer_equality("x+1", "1+x")


@pytest.mark.parametrize("expected, got, verdict", JUDGE_CASES)
def test_judge_path_against_replay_cassette(judge_cassette, expected, got, verdict):
    assert not fast_equal(expected, got)
    assert check_answer_equality(expected, got, judge_cassette) is (verdict == "Yes")
