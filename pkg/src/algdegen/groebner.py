"""A small Buchberger engine over Q(i).

Polynomials are dicts ``{exponent-tuple: coefficient}`` over a fixed variable
list.  Coefficients are ``gmpy2.mpq`` when real and
:class:`~algdegen.scalar.GaussianRational` otherwise, which keeps the common
all-real systems fast.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import combinations

from gmpy2 import mpq

from .scalar import GaussianRational, ParamRational, as_scalar


class BudgetExceeded(RuntimeError):
    def __init__(self, reason, stats):
        super().__init__(f"Groebner budget exceeded ({reason}): {stats}")
        self.reason = reason
        self.stats = dict(stats)


@dataclass(frozen=True)
class Budget:
    max_pairs: int = 5000
    max_degree: int = 12
    max_seconds: float | None = None


def _num(c):
    if isinstance(c, GaussianRational):
        return c.re if c.im == 0 else c
    return mpq(c)


def _inv(c):
    return 1 / c if not isinstance(c, GaussianRational) else c.inverse()


class MonomialOrder:
    """``degrevlex`` or ``lex``; ``elim`` is a block order that eliminates the
    first ``block`` variables (degrevlex inside each block)."""

    def __init__(self, kind="degrevlex", block=None):
        if kind not in ("degrevlex", "lex", "elim"):
            raise ValueError(f"unknown monomial order {kind!r}")
        self.kind = kind
        self.block = block
        if kind == "lex":
            self.key = lambda m: m
        elif kind == "degrevlex":
            self.key = _drl
        else:
            b = block

            def key(m, b=b):
                return (_drl(m[:b]), _drl(m[b:]))

            self.key = key

    def __repr__(self):
        return f"MonomialOrder({self.kind!r}, block={self.block})"


def _drl(m):
    return (sum(m), tuple(-e for e in reversed(m)))


DEGREVLEX = MonomialOrder("degrevlex")
LEX = MonomialOrder("lex")


class MPoly:
    """Immutable-by-convention polynomial over a declared variable tuple."""

    __slots__ = ("vars", "terms")

    def __init__(self, vars, terms=None):
        self.vars = tuple(vars)
        n = len(self.vars)
        clean = {}
        for m, c in (terms or {}).items():
            m = tuple(m)
            if len(m) != n:
                raise ValueError("exponent length does not match variables")
            c = _num(c)
            if c:
                clean[m] = c
        self.terms = clean

    @classmethod
    def var(cls, vars, name):
        vars = tuple(vars)
        k = vars.index(name)
        return cls(vars, {tuple(1 if j == k else 0 for j in range(len(vars))): 1})

    @classmethod
    def const(cls, vars, c):
        return cls(vars, {(0,) * len(vars): c})

    @classmethod
    def from_scalar(cls, vars, x):
        """Polynomial from a parameter-polynomial scalar whose parameters are
        among ``vars``."""
        x = as_scalar(x)
        vars = tuple(vars)
        if isinstance(x, GaussianRational):
            return cls.const(vars, x)
        if not isinstance(x, ParamRational) or not x.is_polynomial():
            raise ValueError(f"{x} is not a polynomial")
        idx = [vars.index(v) for v in x.vars]
        terms = {}
        for m, c in x.numerator_terms().items():
            e = [0] * len(vars)
            for k, d in zip(idx, m):
                e[k] = d
            terms[tuple(e)] = c
        return cls(vars, terms)

    def _wrap(self, terms):
        p = MPoly.__new__(MPoly)
        p.vars = self.vars
        p.terms = terms
        return p

    def __add__(self, other):
        other = self._coerce(other)
        return self._wrap(_add(self.terms, other.terms, 1))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return self._wrap(_add(self.terms, other.terms, -1))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return self._wrap({m: -c for m, c in self.terms.items()})

    def __mul__(self, other):
        other = self._coerce(other)
        return self._wrap(_mul(self.terms, other.terms))

    __rmul__ = __mul__

    def __pow__(self, k):
        r = MPoly.const(self.vars, 1)
        for _ in range(k):
            r = r * self
        return r

    def _coerce(self, other):
        if isinstance(other, MPoly):
            if other.vars != self.vars:
                raise ValueError("variable lists differ")
            return other
        return MPoly.const(self.vars, as_scalar(other))

    def __eq__(self, other):
        if isinstance(other, MPoly):
            return self.vars == other.vars and self.terms == other.terms
        try:
            return self == self._coerce(other)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash((self.vars, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self):
        return all(not any(m) for m in self.terms)

    def degree(self):
        return max((sum(m) for m in self.terms), default=-1)

    def variables_used(self):
        return {self.vars[k] for m in self.terms for k, e in enumerate(m) if e}

    def leading_monomial(self, order=DEGREVLEX):
        return max(self.terms, key=order.key)

    def evaluate(self, point):
        """Evaluate at ``{name: value}`` for all variables."""
        vals = [as_scalar(point[v]) for v in self.vars]
        acc = GaussianRational(0)
        for m, c in self.terms.items():
            term = GaussianRational(0) + c
            for v, e in zip(vals, m):
                if e:
                    term = term * v**e
            acc = acc + term
        return acc

    def substitute(self, images, new_vars):
        """Replace each variable by an :class:`MPoly` over ``new_vars``."""
        acc = MPoly(new_vars)
        one = MPoly.const(new_vars, 1)
        cache = {}
        for m, c in self.terms.items():
            term = one * c
            for k, e in enumerate(m):
                if e:
                    key = (k, e)
                    if key not in cache:
                        cache[key] = images[k] ** e
                    term = term * cache[key]
            acc = acc + term
        return acc

    def __str__(self):
        if not self.terms:
            return "0"
        from .scalar import format_term, join_terms

        parts = []
        for m in sorted(self.terms, key=DEGREVLEX.key, reverse=True):
            mono = "*".join(
                (v if e == 1 else f"{v}^{e}") for v, e in zip(self.vars, m) if e
            )
            c = self.terms[m]
            parts.append(format_term(GaussianRational(0) + c, mono))
        return join_terms(parts)

    __repr__ = __str__


def _add(a, b, sign):
    r = dict(a)
    for m, c in b.items():
        v = r.get(m)
        nv = (v + c if sign > 0 else v - c) if v is not None else (c if sign > 0 else -c)
        if nv:
            r[m] = nv
        else:
            r.pop(m, None)
    return r


def _mul(a, b):
    r = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            m = tuple(x + y for x, y in zip(m1, m2))
            v = r.get(m)
            nv = c1 * c2 if v is None else v + c1 * c2
            if nv:
                r[m] = nv
            else:
                r.pop(m, None)
    return r


def _divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def _lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def _sub_mul(p, g, coeff, shift):
    """``p - coeff * x^shift * g`` in place."""
    for m, c in g.items():
        mm = tuple(x + y for x, y in zip(m, shift))
        v = p.get(mm)
        d = coeff * c
        nv = -d if v is None else v - d
        if nv:
            p[mm] = nv
        else:
            p.pop(mm, None)


class _Elem:
    __slots__ = ("poly", "lm", "lc", "sugar")

    def __init__(self, poly, key, sugar=None):
        self.poly = poly
        self.lm = max(poly, key=key)
        self.lc = poly[self.lm]
        self.sugar = sugar if sugar is not None else max(sum(m) for m in poly)


def _normal_form(p, G, key, full=True):
    p = dict(p)
    r = {}
    while p:
        m = max(p, key=key)
        c = p[m]
        for g in G:
            if _divides(g.lm, m):
                shift = tuple(x - y for x, y in zip(m, g.lm))
                _sub_mul(p, g.poly, c * _inv(g.lc), shift)
                break
        else:
            if not full:
                r.update(p)
                return r
            r[m] = c
            del p[m]
    return r


def _monic(p, key):
    lm = max(p, key=key)
    inv = _inv(p[lm])
    return {m: c * inv for m, c in p.items()}


@dataclass
class GroebnerBasis:
    vars: tuple
    order: MonomialOrder
    polys: list
    stats: dict = field(default_factory=dict)

    def contains_one(self):
        return contains_one(self)

    def reduce(self, f):
        return reduce(f, self)

    def __iter__(self):
        return iter(self.polys)

    def __len__(self):
        return len(self.polys)


def buchberger(gens, order=DEGREVLEX, budget=None) -> GroebnerBasis:
    """Reduced Groebner basis of the ideal generated by ``gens``.

    Uses the product and chain (Gebauer-Moeller) criteria with normal
    selection by sugar degree.  Raises :class:`BudgetExceeded` when the pair,
    degree or time cap is hit."""
    budget = budget or Budget()
    gens = [g for g in gens if g]
    if not gens:
        raise ValueError("need at least one generator (use the zero ideal explicitly)")
    vars = gens[0].vars
    if any(g.vars != vars for g in gens):
        raise ValueError("generators must share a variable list")
    key = order.key
    start = time.monotonic()
    stats = {"pairs": 0, "zero_reductions": 0, "max_degree": 0}

    G: list[_Elem] = []
    pairs: list[tuple] = []

    def check_time():
        if budget.max_seconds is not None and time.monotonic() - start > budget.max_seconds:
            raise BudgetExceeded("time", {**stats, "basis_size": len(G)})

    def add(poly):
        h = _Elem(_monic(poly, key), key)
        if not any(h.lm):
            return True
        # Gebauer-Moeller update
        new_pairs = [(i, len(G)) for i in range(len(G))]
        lcms = {p: _lcm(G[p[0]].lm, h.lm) for p in new_pairs}
        # chain criterion on old pairs
        kept = []
        for (i, j, lcm_ij, sug) in pairs:
            if (
                _divides(h.lm, lcm_ij)
                and _lcm(G[i].lm, h.lm) != lcm_ij
                and _lcm(G[j].lm, h.lm) != lcm_ij
            ):
                continue
            kept.append((i, j, lcm_ij, sug))
        pairs[:] = kept
        # among new pairs, drop those whose lcm is a proper multiple of another
        cand = []
        for p in new_pairs:
            lp = lcms[p]
            if any(_divides(lcms[q], lp) and lcms[q] != lp for q in new_pairs):
                continue
            cand.append(p)
        seen = set()
        final = []
        for p in sorted(cand, key=lambda p: key(lcms[p])):
            lp = lcms[p]
            if lp in seen:
                continue
            seen.add(lp)
            i = p[0]
            # product criterion
            if all(a == 0 or b == 0 for a, b in zip(G[i].lm, h.lm)):
                continue
            sug = max(G[i].sugar - sum(G[i].lm), h.sugar - sum(h.lm)) + sum(lp)
            final.append((i, len(G), lp, sug))
        G.append(h)
        pairs.extend(final)
        return False

    for g in sorted(gens, key=lambda g: key(max(g.terms, key=key))):
        r = _normal_form(g.terms, G, key)
        if r and add(r):
            return GroebnerBasis(vars, order, [MPoly.const(vars, 1)], stats)

    while pairs:
        check_time()
        pairs.sort(key=lambda p: (p[3], key(p[2])))
        i, j, lcm_ij, sug = pairs.pop(0)
        stats["pairs"] += 1
        if stats["pairs"] > budget.max_pairs:
            raise BudgetExceeded("pairs", {**stats, "basis_size": len(G)})
        d = sum(lcm_ij)
        stats["max_degree"] = max(stats["max_degree"], d)
        if d > budget.max_degree:
            raise BudgetExceeded("degree", {**stats, "basis_size": len(G)})
        gi, gj = G[i], G[j]
        s = {}
        _sub_mul(s, gi.poly, -_inv(gi.lc), tuple(a - b for a, b in zip(lcm_ij, gi.lm)))
        _sub_mul(s, gj.poly, _inv(gj.lc), tuple(a - b for a, b in zip(lcm_ij, gj.lm)))
        r = _normal_form(s, G, key)
        if not r:
            stats["zero_reductions"] += 1
            continue
        if add(r):
            return GroebnerBasis(vars, order, [MPoly.const(vars, 1)], stats)

    # reduce
    elems = sorted(G, key=lambda e: key(e.lm))
    minimal = []
    for e in elems:
        if not any(_divides(o.lm, e.lm) for o in minimal):
            minimal.append(e)
    reduced = []
    for k, e in enumerate(minimal):
        others = minimal[:k] + minimal[k + 1:]
        r = _normal_form(e.poly, others, key)
        reduced.append(_monic(r, key))
    reduced.sort(key=lambda p: key(max(p, key=key)))
    stats["basis_size"] = len(reduced)
    return GroebnerBasis(vars, order, [MPoly(vars, p) for p in reduced], stats)


def contains_one(gb: GroebnerBasis) -> bool:
    """True iff the ideal is the unit ideal, i.e. the system has no solution
    over C (weak Nullstellensatz; coefficients lie in Q(i))."""
    return any(p.is_constant() and p for p in gb.polys)


def reduce(f: MPoly, gb: GroebnerBasis) -> MPoly:
    key = gb.order.key
    G = [_Elem(p.terms, key) for p in gb.polys]
    return MPoly(f.vars, _normal_form(f.terms, G, key))


def is_empty(gens, order=DEGREVLEX, budget=None) -> bool:
    return contains_one(buchberger(gens, order, budget))


def polys_in(gb: GroebnerBasis, names):
    """Basis elements involving only the variables ``names`` (elimination)."""
    names = set(names)
    return [p for p in gb.polys if p.variables_used() <= names]
