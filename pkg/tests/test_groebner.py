import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from algdegen.groebner import DEGREVLEX, LEX, Budget, BudgetExceeded, MPoly, buchberger, contains_one, reduce

VARS = ("x", "y", "z")


@st.composite
def polys(draw, max_terms=3):
    terms = {}
    for _ in range(draw(st.integers(1, max_terms))):
        m = tuple(draw(st.integers(0, 2)) for _ in VARS)
        terms[m] = draw(st.integers(-3, 3))
    return MPoly(VARS, terms)


def _to_sympy(p):
    syms = sp.symbols(VARS)
    return sum((sp.Rational(str(c)) * sp.prod([s**e for s, e in zip(syms, m)]) for m, c in p.terms.items()),
               sp.Integer(0))


def _normalized(exprs, order):
    syms = sp.symbols(VARS)
    out = set()
    for e in exprs:
        p = sp.Poly(e, *syms)
        out.add(p.monic().as_expr())
    return out


@given(st.lists(polys(), min_size=1, max_size=3), st.sampled_from(["grevlex", "lex"]))
def test_reduced_basis_matches_sympy(gens, order):
    gens = [g for g in gens if g]
    if not gens:
        return
    syms = sp.symbols(VARS)
    try:
        mine = buchberger(gens, DEGREVLEX if order == "grevlex" else LEX, Budget(max_pairs=400, max_seconds=5))
    except BudgetExceeded:
        return
    theirs = sp.groebner([_to_sympy(g) for g in gens], *syms, order=order)
    assert _normalized([_to_sympy(p) for p in mine.polys], order) == _normalized(list(theirs.exprs), order)


@given(st.lists(polys(), min_size=1, max_size=3), polys(), polys())
def test_ideal_membership(gens, a, b):
    gens = [g for g in gens if g]
    if not gens:
        return
    try:
        gb = buchberger(gens, DEGREVLEX, Budget(max_pairs=400, max_seconds=5))
    except BudgetExceeded:
        return
    f = gens[0] * a + gens[-1] * b
    assert not reduce(f, gb)


def test_unit_ideal_and_budget():
    x, y = MPoly.var(VARS, "x"), MPoly.var(VARS, "y")
    assert contains_one(buchberger([x * y - 1, x]))
    assert not contains_one(buchberger([x * x - y]))
    z = MPoly.var(VARS, "z")
    gens = [x * x * y - z + 1, x * y * y - x * z, y * z * z - x + 2]
    with pytest.raises(BudgetExceeded) as exc:
        buchberger(gens, DEGREVLEX, Budget(max_pairs=2))
    assert exc.value.reason == "pairs"
    with pytest.raises(BudgetExceeded):
        buchberger(gens, DEGREVLEX, Budget(max_degree=3))


def test_evaluate_and_substitute():
    x, y = MPoly.var(VARS, "x"), MPoly.var(VARS, "y")
    p = x * x + 3 * y
    assert p.evaluate({"x": 2, "y": 1, "z": 0}) == 7
    assert p.degree() == 2
    assert set(p.variables_used()) == {"x", "y"}
