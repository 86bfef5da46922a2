from fractions import Fraction

import pytest

from dpnalign import smt
from dpnalign.smt import INT, REAL, SymVar


@pytest.mark.parametrize("value,text", [
    (True, "true"), (3, "3"), (-3, "(- 3)"), (Fraction(5), "5.0"),
    (Fraction(-1, 3), "(- (/ 1.0 3.0))"),
])
def test_literals(value, text):
    assert smt.literal(value) == text


def test_quoting():
    assert smt.quote("X_1_x") == "X_1_x"
    assert smt.quote("M 1|p") == "|M 1_p|"
    assert smt.quote("1abc") == "|1abc|"


def test_simplifying_constructors():
    x = SymVar("x", INT)
    assert smt.and_() is True
    assert smt.and_(x, True) == x
    assert smt.or_(False, False) is False
    assert smt.not_(False) is True
    assert smt.to_smt(smt.ite(smt.ge(x, 1), x, 0)) == "(ite (>= x 1) x 0)"


def test_evaluate_and_free_vars():
    x, r = SymVar("x", INT), SymVar("r", REAL)
    term = smt.and_(smt.le(smt.add(x, 1), 3), smt.eq(r, Fraction(1, 2)))
    assert smt.evaluate(term, {"x": 2, "r": Fraction(1, 2)})
    assert not smt.evaluate(term, {"x": 3, "r": Fraction(1, 2)})
    assert smt.free_vars(term) == {x, r}
    with pytest.raises(smt.EvaluationError):
        smt.evaluate(term, {"x": 1})


def test_deep_terms_print_without_recursion():
    x = SymVar("x", INT)
    t = x
    for _ in range(5000):
        t = smt.app("ite", smt.ge(x, 0), t, 0)
    assert smt.to_smt(t).count("ite") == 5000
    assert smt.size(t) > 5000
