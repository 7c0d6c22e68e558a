"""Hypothesis strategies and sympy conversions shared by the tests."""

from fractions import Fraction

import sympy as sp
from hypothesis import strategies as st

from algdegen.algebra import Algebra
from algdegen.scalar import GaussianRational, as_scalar

small_fracs = st.fractions(min_value=-5, max_value=5, max_denominator=6)


@st.composite
def gaussians(draw, allow_zero=True):
    re = draw(small_fracs)
    im = draw(st.one_of(st.just(Fraction(0)), small_fracs))
    g = GaussianRational(re, im)
    if not allow_zero and not g:
        g = GaussianRational(1)
    return g


def to_sympy(g):
    g = as_scalar(g)
    return sp.Rational(str(g.re)) + sp.I * sp.Rational(str(g.im))


def from_sympy(x):
    x = sp.nsimplify(sp.expand(x))
    return GaussianRational(Fraction(str(sp.re(x))), Fraction(str(sp.im(x))))


@st.composite
def matrices(draw, n=3, entries=None):
    if entries is None:
        entries = st.integers(-3, 3).map(GaussianRational)
    return [[draw(entries) for _ in range(n)] for _ in range(n)]


@st.composite
def invertible_matrices(draw, n=3):
    from algdegen import linalg

    m = draw(matrices(n))
    if not linalg.det(m):
        for i in range(n):
            m[i][i] = m[i][i] + GaussianRational(7 + i)
        if not linalg.det(m):
            m = [[GaussianRational(1 if i == j else 0) for j in range(n)] for i in range(n)]
    return m


@st.composite
def algebras(draw, n=3, anticommutative=False, density=0.3):
    c = [[[GaussianRational(0)] * n for _ in range(n)] for _ in range(n)]
    coeff = st.integers(-2, 2).map(GaussianRational)
    for i in range(n):
        for j in range(n):
            if anticommutative and j <= i:
                continue
            for k in range(n):
                if draw(st.floats(0, 1)) < density:
                    c[i][j][k] = draw(coeff)
            if anticommutative:
                c[j][i] = [-x for x in c[i][j]]
    return Algebra(n, c)
