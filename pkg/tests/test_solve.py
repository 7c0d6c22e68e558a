import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from algdegen.groebner import MPoly, buchberger
from algdegen.scalar import GaussianRational
from algdegen.solve import (
    eliminate_to,
    gaussian_roots,
    has_solution,
    minimal_polynomial,
    parameter_values,
)
from strategies import gaussians, to_sympy

V = ("x", "y", "a")


def _v(name):
    return MPoly.var(V, name)


@given(st.lists(gaussians(), min_size=1, max_size=4))
def test_gaussian_roots_recover_product(roots):
    x = _v("x")
    p = MPoly.const(V, 1)
    for r in roots:
        p = p * (x - MPoly.const(V, r))
    got, others = gaussian_roots(p, "x")
    assert not others
    assert set(got) == set(roots)


def test_gaussian_roots_irreducible_factor():
    x = _v("x")
    got, others = gaussian_roots(x * x - 2, "x")
    assert got == [] and len(others) == 1
    got, _ = gaussian_roots(x * x + 1, "x")
    assert set(got) == {GaussianRational(0, 1), GaussianRational(0, -1)}


def test_has_solution_against_sympy():
    x, y, a = _v("x"), _v("y"), _v("a")
    systems = [
        ([x * y - 1, x - y], True),
        ([x * y - 1, x], False),
        ([x * x + y * y - 1, x - y * a], True),  # positive dimensional
        ([x * x - 2, x * y - 1, y * y - 3], False),
    ]
    syms = sp.symbols(V)
    for eqs, expected in systems:
        sym = [sum(sp.Rational(str(c)) * sp.prod([s**e for s, e in zip(syms, m)]) for m, c in q.terms.items())
               for q in eqs]
        assert (list(sp.groebner(sym, *syms).exprs) != [1]) == expected
        assert has_solution(eqs, V).nonempty == expected
        assert has_solution(eqs, V, slice_dim=1).nonempty == expected


def test_minimal_polynomial_zero_dimensional():
    x, y, a = _v("x"), _v("y"), _v("a")
    gb = buchberger([x * x - 3, y - x, a - 2])
    mp = minimal_polynomial(gb, "y")
    assert mp.degree() == 2
    assert mp.evaluate({"x": 0, "y": 0, "a": 0}) == -3


def test_parameter_values_and_elimination():
    x, y, a = _v("x"), _v("y"), _v("a")
    # a takes the values 2 and 3
    eqs = [(a - 2) * (a - 3), x * a - 1, y - x]
    roots, others = parameter_values(eqs, V, "a")
    assert set(roots) == {GaussianRational(2), GaussianRational(3)} and not others
    polys = eliminate_to(eqs, V, "a")
    assert polys and all(p.variables_used() <= {"a"} for p in polys)
    assert parameter_values([x * a - 1, x], V, "a") is None


@given(gaussians(allow_zero=False))
def test_parameter_values_single(r):
    x, y, a = _v("x"), _v("y"), _v("a")
    eqs = [x - MPoly.const(V, r), a * x - 1, y * y - x]
    roots, _ = parameter_values(eqs, V, "a")
    assert roots == [GaussianRational(1) / r]
    assert to_sympy(r) != 0
