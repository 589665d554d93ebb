"""Answer pairs with the verdict the fast equality path must return.

``rational`` marks rows whose verdict is also checked against exact
arithmetic on both sides."""

EQUALITY_TABLE = [
    # (expected, got, equal, rational)
    ("1/2", "0.5", True, True),
    ("\\frac{1}{2}", "0.5", True, True),
    ("\\dfrac{3}{4}", "0.75", True, True),
    ("$\\frac{3}{4}$", ".75", True, True),
    ("-\\frac{7}{4}", "-1.75", True, True),
    ("5/2", "2.50", True, True),
    ("2/6", "1/3", True, True),
    ("42", "42.0", True, True),
    ("1000", "1,000", True, True),
    ("0", "-0", True, True),
    ("3/2", "1.5", True, True),
    ("1/3", "0.333", False, True),
    ("0.1", "1/100", False, True),
    ("2", "-2", False, True),
    ("3.14", "22/7", False, True),
    ("\\boxed{42}", "42", True, False),
    ("x=3", "3", True, False),
    ("\\left(2,3\\right)", "(2, 3)", True, False),
    ("\\text{B}", "b", True, False),
    ("\\frac{x+1}{2}", "(x+1)/2", True, False),
    ("\\dfrac12", "1/2", True, False),
    ("7.", "7", True, False),
    ("\\sqrt{2}", "\\sqrt{2}", True, False),
    ("\\sqrt{2}", "\\sqrt{3}", False, False),
    ("(2,3)", "(3,2)", False, False),
    ("\\pi", "3.14", False, False),
    ("x+1", "x-1", False, False),
    ("A", "B", False, False),
    ("12", "13", False, False),
    ("\\frac{1}{2}", "\\frac{2}{1}", False, False),
]

# pairs the fast path cannot settle, with the recorded judge verdict
JUDGE_CASES = [
    ("\\sqrt{4}", "2", "Yes"),
    ("x+1", "1+x", "Yes"),
    ("12", "12 cm", "Yes"),
    ("50\\%", "1/2", "Yes"),
    ("\\pi", "3.14", "No"),
    ("2x", "x^2", "No"),
]
