"""Existence of solutions for polynomial systems via Groebner bases.

A nonempty verdict may come from a random affine slice (a subset of the
solution set); an empty verdict always comes from the unsliced system.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

import sympy as sp

from .groebner import DEGREVLEX, Budget, BudgetExceeded, MPoly, MonomialOrder, buchberger, contains_one
from .groebner import reduce as nf
from .linalg import nullspace
from .scalar import GaussianRational, as_scalar


class Inconclusive(RuntimeError):
    def __init__(self, msg, stats=None):
        super().__init__(msg)
        self.stats = dict(stats or {})


@dataclass(frozen=True)
class SolveResult:
    nonempty: bool
    sliced: int  # number of slicing hyperplanes used for the verdict
    basis_size: int


def determinant_poly(mat):
    n = len(mat)
    if n == 1:
        return mat[0][0]
    total = None
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in mat[1:]]
        term = mat[0][j] * determinant_poly(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total


def random_slice(eqs, vars, k, keep, rng):
    """Substitute ``k`` of the variables (never those in ``keep``) by random
    affine combinations of the remaining ones."""
    free = [v for v in vars if v not in keep]
    if k > len(free):
        raise ValueError("slice dimension exceeds number of free variables")
    elim = free[:k]
    rest = tuple(v for v in vars if v not in elim)
    images = []
    for v in vars:
        if v in elim:
            img = MPoly.const(rest, rng.randint(-7, 7))
            for w in rest:
                if w in keep:
                    continue
                img = img + MPoly.var(rest, w) * rng.randint(-4, 4)
            images.append(img)
        else:
            images.append(MPoly.var(rest, v))
    return [e.substitute(images, rest) for e in eqs], rest


def coordinate_slice(eqs, vars, k, keep, rng):
    """Pin ``k`` randomly chosen variables (outside ``keep``) to small
    constants, zero included."""
    free = [v for v in vars if v not in keep]
    pinned = set(rng.sample(free, k))
    rest = tuple(v for v in vars if v not in pinned)
    images = [
        MPoly.const(rest, rng.choice((0, 1, -1, rng.randint(-5, 5)))) if v in pinned else MPoly.var(rest, v)
        for v in vars
    ]
    return [e.substitute(images, rest) for e in eqs], rest


def _quick_budget(budget):
    secs = budget.max_seconds
    return Budget(max_pairs=min(budget.max_pairs, 800), max_degree=budget.max_degree,
                  max_seconds=2.0 if secs is None else min(secs, 2.0))


def has_solution(eqs, vars, *, slice_dim=0, keep=(), budget=None, seed=0, attempts=2, order=DEGREVLEX,
                 coordinate_attempts=8):
    """Decide whether ``eqs`` has a common zero over C.

    ``slice_dim`` is the expected dimension of the solution set.  Cheap
    coordinate slices are tried first, then generic affine slices of that
    codimension (which meet every component of that dimension); any nonempty
    slice proves a solution exists.  Falls back to the full system when
    slices come up empty."""
    budget = budget or Budget()
    rng = random.Random(seed)
    eqs = [e for e in eqs if e]
    if not eqs:
        return SolveResult(True, 0, 0)
    if any(e.is_constant() for e in eqs):
        return SolveResult(False, 0, 1)
    last_error = None
    if slice_dim > 0:
        quick = _quick_budget(budget)
        for _ in range(coordinate_attempts):
            sl, rest = coordinate_slice(eqs, vars, slice_dim, keep, rng)
            sl = [e for e in sl if e]
            if any(e.is_constant() for e in sl):
                continue
            if not sl:
                return SolveResult(True, slice_dim, 0)
            try:
                gb = buchberger(sl, order, quick)
            except BudgetExceeded:
                continue
            if not contains_one(gb):
                return SolveResult(True, slice_dim, len(gb))
        for _ in range(attempts):
            sl, rest = random_slice(eqs, vars, slice_dim, keep, rng)
            sl = [e for e in sl if e]
            if any(e.is_constant() for e in sl):
                continue
            if not sl:
                return SolveResult(True, slice_dim, 0)
            try:
                gb = buchberger(sl, order, budget)
            except BudgetExceeded as exc:
                last_error = exc
                continue
            if not contains_one(gb):
                return SolveResult(True, slice_dim, len(gb))
    try:
        gb = buchberger(eqs, order, budget)
    except BudgetExceeded as exc:
        raise Inconclusive(str(exc), exc.stats) from (last_error or exc)
    return SolveResult(not contains_one(gb), 0, len(gb))


def gaussian_roots(p: MPoly, var: str):
    """Roots in Q(i) of a univariate polynomial; returns ``(roots, others)``
    where ``others`` lists irreducible factors of degree > 1 as text."""
    x = sp.Symbol(var)
    k = p.vars.index(var)
    expr = 0
    for m, c in p.terms.items():
        c = GaussianRational(0) + c
        expr += (sp.Rational(str(c.re)) + sp.I * sp.Rational(str(c.im))) * x ** m[k]
    poly = sp.Poly(expr, x, domain="QQ_I")
    roots, others = [], []
    if poly.degree() <= 0:
        return roots, others
    for f, _ in poly.factor_list()[1]:
        if f.degree() == 1:
            a, b = f.all_coeffs()
            r = sp.nsimplify(-b.as_expr() / a.as_expr()) if hasattr(b, "as_expr") else -b / a
            r = sp.sympify(r)
            roots.append(GaussianRational(Fraction(str(sp.re(r))), Fraction(str(sp.im(r)))))
        else:
            others.append(str(f.as_expr()))
    return sorted(set(roots), key=lambda g: (g.re, g.im)), others


def eliminate_to(eqs, vars, target, *, slice_dim=0, budget=None, seed=0):
    """Univariate polynomials in ``target`` from an elimination basis of a
    (sliced) system; empty list when the system has no solutions."""
    rng = random.Random(seed)
    budget = budget or Budget()
    if slice_dim:
        eqs, vars = random_slice(eqs, vars, slice_dim, (target,), rng)
        eqs = [e for e in eqs if e]
    order_vars = tuple(v for v in vars if v != target) + (target,)
    perm = [vars.index(v) for v in order_vars]
    reordered = [MPoly(order_vars, {tuple(m[i] for i in perm): c for m, c in e.terms.items()}) for e in eqs]
    if any(e.is_constant() and e for e in reordered):
        return []
    gb = buchberger(reordered, MonomialOrder("elim", len(order_vars) - 1), budget)
    if contains_one(gb):
        return []
    return [p for p in gb.polys if p.variables_used() <= {target}]


def minimal_polynomial(gb, var, max_degree=16):
    """Minimal polynomial of ``var`` modulo the ideal of ``gb`` (found as the
    first linear dependency among normal forms of its powers), or ``None``
    when none exists up to ``max_degree``."""
    vars = gb.vars
    x = MPoly.var(vars, var)
    forms = [nf(MPoly.const(vars, 1), gb)]
    p = MPoly.const(vars, 1)
    for deg in range(1, max_degree + 1):
        p = nf(p * x, gb)
        forms.append(p)
        monos = sorted({m for f in forms for m in f.terms})
        # columns: powers; rows: monomials
        rows = [[as_scalar(f.terms.get(m, 0)) for f in forms] for m in monos]
        ker = nullspace(rows, len(forms)) if rows else [tuple([0] * deg + [1])]
        if ker:
            v = ker[0]
            lead = v[-1]
            terms = {}
            for k, c in enumerate(v):
                if c:
                    e = [0] * len(vars)
                    e[vars.index(var)] = k
                    terms[tuple(e)] = as_scalar(c) / lead
            return MPoly(vars, terms)
    return None


def parameter_values(eqs, vars, target, *, slice_dim=0, budget=None, seed=0, attempts=2, coordinate_attempts=8):
    """Values of ``target`` attained on the solution set, as ``(roots,
    others)`` from :func:`gaussian_roots`; ``None`` when there are no
    solutions.  With slicing the result may be a nonempty subset of all
    attained values; every reported root is attained."""
    budget = budget or Budget()
    rng = random.Random(seed)
    plans = []
    if slice_dim:
        plans += [("coord", _quick_budget(budget))] * coordinate_attempts
        plans += [("affine", budget)] * attempts
    else:
        plans.append(("none", budget))
    for kind, bud in plans:
        if kind == "coord":
            sl, rest = coordinate_slice(eqs, vars, slice_dim, (target, "d"), rng)
        elif kind == "affine":
            sl, rest = random_slice(eqs, vars, slice_dim, (target, "d"), rng)
        else:
            sl, rest = list(eqs), tuple(vars)
        sl = [e for e in sl if e]
        if any(e.is_constant() for e in sl):
            continue
        try:
            gb = buchberger(sl, DEGREVLEX, bud)
        except BudgetExceeded:
            continue
        if contains_one(gb):
            continue
        mp = minimal_polynomial(gb, target)
        if mp is not None:
            return gaussian_roots(mp, target)
    if not has_solution(eqs, vars, slice_dim=0, budget=budget).nonempty:
        return None
    polys = eliminate_to(eqs, vars, target, slice_dim=slice_dim, budget=budget, seed=seed)
    if not polys:
        return None
    return gaussian_roots(min(polys, key=lambda q: q.degree()), target)
