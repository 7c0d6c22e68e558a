"""Exact scalar tower: Gaussian rationals, rational functions in named
parameters, and Laurent polynomials in the degeneration variable ``t``.

Arithmetic results are always returned at the lowest level of the tower that
can hold them, so ``(1 - alpha)/(2 - alpha) + 1/(2 - alpha)`` comes back as
the Gaussian rational ``1``.  Use :func:`as_laurent` when a container needs
Laurent entries.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Union

from gmpy2 import mpq
from sympy import QQ_I
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyRing

T_SYMBOL = "t"
I_SYMBOL = "i"


class ScalarError(ArithmeticError):
    pass


class DivisionByZero(ScalarError, ZeroDivisionError):
    pass


class NonLaurentQuotient(ScalarError):
    """Quotient is not a Laurent polynomial in t."""


class SpecializationPole(ScalarError):
    def __init__(self, msg, bindings=None):
        super().__init__(msg)
        self.bindings = dict(bindings or {})


class ExprSyntaxError(ScalarError, ValueError):
    def __init__(self, msg, pos):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


class UnknownSymbol(ExprSyntaxError):
    def __init__(self, name, pos):
        ScalarError.__init__(self, f"unknown symbol {name!r} at position {pos}")
        self.pos = pos
        self.name = name


# --------------------------------------------------------------------------
# Gaussian rationals


class GaussianRational:
    """``re + im*i`` with ``re, im`` rational."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, Fraction):
            re = mpq(re.numerator, re.denominator)
        if isinstance(im, Fraction):
            im = mpq(im.numerator, im.denominator)
        self.re = mpq(re)
        self.im = mpq(im)

    @classmethod
    def _from_qqi(cls, e):
        return cls(e.x, e.y)

    def _to_qqi(self):
        return QQ_I(self.re, self.im)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)) or type(other).__name__ == "mpq":
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def norm(self):
        return self.re * self.re + self.im * self.im

    def inverse(self):
        n = self.norm()
        if not n:
            raise DivisionByZero("division by zero")
        return GaussianRational(self.re / n, -self.im / n)

    def _binop(self, other, op, reflected=False):
        o = _as_gq(other)
        if o is None:
            return NotImplemented
        a, b = (o, self) if reflected else (self, o)
        if op == "+":
            return GaussianRational(a.re + b.re, a.im + b.im)
        if op == "-":
            return GaussianRational(a.re - b.re, a.im - b.im)
        if op == "*":
            return GaussianRational(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re)
        return a * b.inverse()

    def __add__(self, o):
        return self._binop(o, "+")

    def __radd__(self, o):
        return self._binop(o, "+", True)

    def __sub__(self, o):
        return self._binop(o, "-")

    def __rsub__(self, o):
        return self._binop(o, "-", True)

    def __mul__(self, o):
        return self._binop(o, "*")

    def __rmul__(self, o):
        return self._binop(o, "*", True)

    def __truediv__(self, o):
        return self._binop(o, "/")

    def __rtruediv__(self, o):
        return self._binop(o, "/", True)

    def __pow__(self, k):
        return _power(self, k, ONE)

    def is_real(self):
        return self.im == 0

    def sort_key(self):
        return (self.re, self.im)

    def __str__(self):
        re_, im_ = self.re, self.im
        if im_ == 0:
            return str(re_)
        if im_ == 1:
            ims = "i"
        elif im_ == -1:
            ims = "-i"
        else:
            ims = f"{im_}*i"
        if re_ == 0:
            return ims
        if ims.startswith("-"):
            return f"{re_}{ims}"
        return f"{re_}+{ims}"

    def __repr__(self):
        return f"GaussianRational({self})"


GQ = GaussianRational
ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I = GaussianRational(0, 1)


def _as_gq(x):
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, (int, Fraction)) or type(x).__name__ == "mpq":
        return GaussianRational(x)
    return None


def _power(x, k, one):
    if not isinstance(k, int):
        raise TypeError("only integer exponents are supported")
    if k < 0:
        return _power(one / x, -k, one)
    result = one
    base = x
    while k:
        if k & 1:
            result = result * base
        base = base * base
        k >>= 1
    return result


# --------------------------------------------------------------------------
# Rational functions in parameters


@lru_cache(maxsize=None)
def _ring(names):
    return PolyRing(names, QQ_I, grlex)


def _lift(poly, names):
    if poly.ring.symbols == tuple(_ring(names).symbols):
        return poly
    return poly.set_ring(_ring(names))


class ParamRational:
    """Quotient of polynomials over Q(i) in named parameters, kept in lowest
    terms with a monic (graded-lex) denominator.  Never constant: constants are
    always demoted to :class:`GaussianRational`."""

    __slots__ = ("vars", "num", "den", "_hash")

    @staticmethod
    def make(names, num, den):
        if not den:
            raise DivisionByZero("division by zero")
        if not num:
            return ZERO
        if den.is_ground:
            c = den.LC
            if c != QQ_I.one:
                num = num.quo_ground(c)
            den = den.ring.one
        else:
            _, num, den = num.cofactors(den)
            c = den.LC
            if c != QQ_I.one:
                num = num.quo_ground(c)
                den = den.quo_ground(c)
        used = tuple(
            n
            for k, n in enumerate(names)
            if any(m[k] for m in num.keys()) or any(m[k] for m in den.keys())
        )
        if not used:
            return GaussianRational._from_qqi(num.LC) * GaussianRational._from_qqi(den.LC).inverse()
        if used != tuple(names):
            num = num.set_ring(_ring(used))
            den = den.set_ring(_ring(used))
        self = object.__new__(ParamRational)
        self.vars = used
        self.num = num
        self.den = den
        self._hash = None
        return self

    @staticmethod
    def var(name):
        if name in (T_SYMBOL, I_SYMBOL):
            raise ValueError(f"{name!r} is reserved")
        R = _ring((name,))
        return ParamRational.make((name,), R.gens[0], R.one)

    @staticmethod
    def from_terms(terms: Mapping, names=None):
        """Polynomial from ``{exponent-tuple: coefficient}`` over ``names``."""
        names = tuple(names)
        R = _ring(names)
        p = R.from_dict({k: _as_gq(v)._to_qqi() for k, v in terms.items() if v})
        return ParamRational.make(names, p, R.one)

    def _aligned(self, other):
        names = tuple(sorted(set(self.vars) | set(other.vars)))
        return (
            names,
            _lift(self.num, names),
            _lift(self.den, names),
            _lift(other.num, names),
            _lift(other.den, names),
        )

    def _binop(self, other, op, reflected=False):
        if isinstance(other, LaurentPoly):
            return NotImplemented
        g = _as_gq(other)
        if g is not None:
            R = _ring(self.vars)
            gq = g._to_qqi()
            if op == "+":
                return ParamRational.make(self.vars, self.num + self.den * gq, self.den)
            if op == "-":
                n = self.num - self.den * gq
                return ParamRational.make(self.vars, -n if reflected else n, self.den)
            if op == "*":
                return ParamRational.make(self.vars, self.num * gq, self.den)
            if reflected:
                return ParamRational.make(self.vars, self.den * gq, self.num)
            if not g:
                raise DivisionByZero("division by zero")
            return ParamRational.make(self.vars, self.num, self.den * gq)
        if not isinstance(other, ParamRational):
            return NotImplemented
        a, b = (other, self) if reflected else (self, other)
        names, an, ad, bn, bd = a._aligned(b)
        if op == "+":
            return ParamRational.make(names, an * bd + bn * ad, ad * bd)
        if op == "-":
            return ParamRational.make(names, an * bd - bn * ad, ad * bd)
        if op == "*":
            return ParamRational.make(names, an * bn, ad * bd)
        return ParamRational.make(names, an * bd, ad * bn)

    def __add__(self, o):
        return self._binop(o, "+")

    def __radd__(self, o):
        return self._binop(o, "+", True)

    def __sub__(self, o):
        return self._binop(o, "-")

    def __rsub__(self, o):
        return self._binop(o, "-", True)

    def __mul__(self, o):
        return self._binop(o, "*")

    def __rmul__(self, o):
        return self._binop(o, "*", True)

    def __truediv__(self, o):
        return self._binop(o, "/")

    def __rtruediv__(self, o):
        return self._binop(o, "/", True)

    def __neg__(self):
        return ParamRational.make(self.vars, -self.num, self.den)

    def __pos__(self):
        return self

    def __pow__(self, k):
        return _power(self, k, ONE)

    def inverse(self):
        return ParamRational.make(self.vars, self.den, self.num)

    def __bool__(self):
        return True

    def __eq__(self, other):
        if isinstance(other, ParamRational):
            return self.vars == other.vars and self.num == other.num and self.den == other.den
        if isinstance(other, LaurentPoly):
            return NotImplemented
        return False

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.vars, frozenset(self.num.items()), frozenset(self.den.items())))
        return self._hash

    def is_polynomial(self):
        return self.den.is_ground

    def numerator_terms(self):
        """``{exponents: GaussianRational}`` of the numerator over ``self.vars``."""
        return {m: GaussianRational._from_qqi(c) for m, c in self.num.items()}

    def denominator_terms(self):
        return {m: GaussianRational._from_qqi(c) for m, c in self.den.items()}

    def __str__(self):
        num = _poly_str(self.num, self.vars)
        if self.den.is_ground:
            return num
        den = _poly_str(self.den, self.vars)
        if len(self.num) > 1 or num.startswith("("):
            num = f"({num})"
        return f"{num}/({den})"

    def __repr__(self):
        return f"ParamRational({self})"


def _mono_str(m, names):
    parts = []
    for k, e in enumerate(m):
        if e == 1:
            parts.append(names[k])
        elif e:
            parts.append(f"{names[k]}^{e}")
    return "*".join(parts)


def _coef_times(c: GaussianRational, mono: str):
    """Render ``c*mono`` (mono may be empty)."""
    if not mono:
        s = str(c)
        return s
    if c == 1:
        return mono
    if c == -1:
        return "-" + mono
    if c.im == 0:
        return f"{c}*{mono}"
    if c.re == 0 and c.im == 1:
        return f"i*{mono}"
    if c.re == 0 and c.im == -1:
        return f"-i*{mono}"
    return f"({c})*{mono}"


def format_term(c, mono: str) -> str:
    """Render ``c*mono`` for any tower element ``c``."""
    c = as_scalar(c)
    if isinstance(c, GaussianRational):
        return _coef_times(c, mono)
    cs = str(c)
    if not mono:
        return cs
    if _SIMPLE.match(cs):
        return f"{cs}*{mono}"
    return f"({cs})*{mono}"


def join_terms(terms) -> str:
    return _join_terms(list(terms))


def _join_terms(terms):
    out = ""
    for k, s in enumerate(terms):
        if k == 0:
            out = s
        elif s.startswith("-"):
            out += " - " + s[1:]
        else:
            out += " + " + s
    return out or "0"


def _poly_str(p, names):
    terms = []
    multi = len(p) > 1
    for m, c in p.terms():
        g = GaussianRational._from_qqi(c)
        s = _coef_times(g, _mono_str(m, names))
        if multi and not any(m) and g.im != 0 and g.re != 0:
            s = f"({s})"
        terms.append(s)
    return _join_terms(terms)


# --------------------------------------------------------------------------
# Laurent polynomials in t


def _is_field(x):
    return isinstance(x, (GaussianRational, ParamRational))


class LaurentPoly:
    """Finite sum ``sum_k c_k t^k`` with coefficients in the parameter field."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms=None):
        clean = {}
        for k, v in (terms or {}).items():
            v = _lower_field(v)
            if v:
                clean[int(k)] = v
        self.terms = clean
        self._hash = None

    @staticmethod
    def t(k=1):
        return LaurentPoly({k: ONE})

    @staticmethod
    def const(c):
        return LaurentPoly({0: c})

    def min_exp(self):
        return min(self.terms) if self.terms else None

    def max_exp(self):
        return max(self.terms) if self.terms else None

    def coeff(self, k):
        return self.terms.get(k, ZERO)

    def is_monomial(self):
        return len(self.terms) == 1

    def lower(self):
        """Demote to the coefficient field when free of t."""
        if not self.terms:
            return ZERO
        if set(self.terms) == {0}:
            return self.terms[0]
        return self

    def _binop(self, other, op, reflected=False):
        o = as_laurent(other) if not isinstance(other, LaurentPoly) else other
        if o is None:
            return NotImplemented
        a, b = (o, self) if reflected else (self, o)
        if op == "+":
            r = dict(a.terms)
            for k, v in b.terms.items():
                r[k] = r[k] + v if k in r else v
            return LaurentPoly(r).lower()
        if op == "-":
            r = dict(a.terms)
            for k, v in b.terms.items():
                r[k] = r[k] - v if k in r else -v
            return LaurentPoly(r).lower()
        if op == "*":
            r = {}
            for k1, v1 in a.terms.items():
                for k2, v2 in b.terms.items():
                    k = k1 + k2
                    r[k] = r[k] + v1 * v2 if k in r else v1 * v2
            return LaurentPoly(r).lower()
        if not b.terms:
            raise DivisionByZero("division by zero")
        if len(b.terms) != 1:
            return _exact_div(a, b)
        (k, c), = b.terms.items()
        inv = ONE / c
        return LaurentPoly({e - k: v * inv for e, v in a.terms.items()}).lower()

    def __add__(self, o):
        return self._binop(o, "+")

    def __radd__(self, o):
        return self._binop(o, "+", True)

    def __sub__(self, o):
        return self._binop(o, "-")

    def __rsub__(self, o):
        return self._binop(o, "-", True)

    def __mul__(self, o):
        return self._binop(o, "*")

    def __rmul__(self, o):
        return self._binop(o, "*", True)

    def __truediv__(self, o):
        return self._binop(o, "/")

    def __rtruediv__(self, o):
        return self._binop(o, "/", True)

    def __neg__(self):
        return LaurentPoly({k: -v for k, v in self.terms.items()})

    def __pos__(self):
        return self

    def __pow__(self, k):
        return _power(self, k, ONE)

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        o = as_laurent(other) if not isinstance(other, LaurentPoly) else other
        if o is None:
            return NotImplemented
        return self.terms == o.terms

    def __hash__(self):
        if self._hash is None:
            low = self.lower()
            self._hash = hash(low) if low is not self else hash(frozenset(self.terms.items()))
        return self._hash

    def __str__(self):
        out = []
        multi = len(self.terms) > 1
        for k in sorted(self.terms, reverse=True):
            c = self.terms[k]
            mono = "" if k == 0 else ("t" if k == 1 else f"t^{k}")
            if isinstance(c, GaussianRational):
                s = _coef_times(c, mono)
                if multi and not mono and c.im != 0 and c.re != 0:
                    s = f"({s})"
            else:
                cs = str(c)
                if not mono:
                    s = f"({cs})" if multi and not _SIMPLE.match(cs) else cs
                elif _SIMPLE.match(cs):
                    s = f"{cs}*{mono}"
                else:
                    s = f"({cs})*{mono}"
            out.append(s)
        return _join_terms(out)

    def __repr__(self):
        return f"LaurentPoly({self})"


def _exact_div(a, b):
    """Quotient of Laurent polynomials when it is again a Laurent polynomial."""
    if not a.terms:
        return ZERO
    mb, ma = b.min_exp(), a.min_exp()
    B = {k - mb: v for k, v in b.terms.items()}
    A = {k - ma: v for k, v in a.terms.items()}
    db = max(B)
    inv = ONE / B[db]
    q = {}
    while A and max(A) >= db:
        d = max(A)
        c = A[d] * inv
        q[d - db] = c
        for k, v in B.items():
            key = k + d - db
            nv = A.get(key, ZERO) - c * v
            if nv:
                A[key] = nv
            else:
                A.pop(key, None)
    if A:
        raise NonLaurentQuotient(f"{a} / ({b}) is not a Laurent polynomial in t")
    return LaurentPoly({k + ma - mb: v for k, v in q.items()}).lower()


_SIMPLE = re.compile(r"^-?[A-Za-z_][A-Za-z0-9_]*(\^\d+)?(\*[A-Za-z_][A-Za-z0-9_]*(\^\d+)?)*$")

Scalar = Union[GaussianRational, ParamRational, LaurentPoly]


def _lower_field(v):
    if isinstance(v, LaurentPoly):
        v = v.lower()
        if isinstance(v, LaurentPoly):
            raise TypeError("Laurent coefficient must be free of t")
        return v
    g = _as_gq(v)
    if g is not None:
        return g
    if isinstance(v, ParamRational):
        return v
    raise TypeError(f"not a scalar: {v!r}")


def as_scalar(x) -> Scalar:
    """Coerce ints/fractions and normalize tower elements to their lowest level."""
    if isinstance(x, LaurentPoly):
        return x.lower()
    if isinstance(x, ParamRational):
        return x
    g = _as_gq(x)
    if g is None:
        raise TypeError(f"not a scalar: {x!r}")
    return g


def as_laurent(x):
    if isinstance(x, LaurentPoly):
        return x
    if isinstance(x, ParamRational):
        return LaurentPoly({0: x})
    g = _as_gq(x)
    if g is None:
        return None
    return LaurentPoly({0: g})


def level(x) -> int:
    """0 for Gaussian rationals, 1 for parameter functions, 2 for t-dependent."""
    x = as_scalar(x)
    if isinstance(x, GaussianRational):
        return 0
    if isinstance(x, ParamRational):
        return 1
    return 2


def params_of(x) -> frozenset:
    x = as_scalar(x)
    if isinstance(x, ParamRational):
        return frozenset(x.vars)
    if isinstance(x, LaurentPoly):
        out = set()
        for c in x.terms.values():
            if isinstance(c, ParamRational):
                out |= set(c.vars)
        return frozenset(out)
    return frozenset()


def is_zero(x) -> bool:
    return not as_scalar(x)


# --------------------------------------------------------------------------
# specialization


def specialize(s, bindings: Mapping[str, object]):
    """Substitute parameters by Gaussian rationals, parameter functions or
    Laurent polynomials.  Raises :class:`SpecializationPole` if a denominator
    vanishes under the binding."""
    s = as_scalar(s)
    if not bindings:
        return s
    bindings = {k: as_scalar(v) for k, v in bindings.items()}
    if isinstance(s, GaussianRational):
        return s
    if isinstance(s, LaurentPoly):
        acc = ZERO
        for k, c in s.terms.items():
            acc = acc + specialize(c, bindings) * LaurentPoly.t(k)
        return acc
    if not any(v in bindings for v in s.vars):
        return s
    num = _subst_poly(s.num, s.vars, bindings)
    den = _subst_poly(s.den, s.vars, bindings)
    if not den:
        raise SpecializationPole(f"denominator of {s} vanishes at {_fmt_bind(bindings)}", bindings)
    return num / den


def _fmt_bind(bindings):
    return ", ".join(f"{k}={v}" for k, v in sorted(bindings.items()))


def _subst_poly(p, names, bindings):
    images = []
    for n in names:
        images.append(bindings[n] if n in bindings else ParamRational.var(n))
    acc = ZERO
    cache = {}
    for m, c in p.items():
        term = GaussianRational._from_qqi(c)
        for k, e in enumerate(m):
            if e:
                key = (k, e)
                if key not in cache:
                    cache[key] = images[k] ** e
                term = term * cache[key]
        acc = acc + term
    return acc


def param(name) -> ParamRational:
    return ParamRational.var(name)


def t_pow(k=1) -> LaurentPoly:
    return LaurentPoly.t(k)


# --------------------------------------------------------------------------
# expression trees and parsing


@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Sym:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Pow:
    base: object
    exp: int


ScalarExpr = Union[Num, Sym, Neg, BinOp, Pow]

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


def _tokenize(src):
    toks = []
    pos = 0
    n = len(src)
    while pos < n:
        m = _TOKEN.match(src, pos)
        if m.group(0).strip() == "":
            break
        if m.group(1):
            toks.append(("num", m.group(1), m.start(1)))
        elif m.group(2):
            toks.append(("id", m.group(2), m.start(2)))
        else:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ExprSyntaxError(f"unexpected character {ch!r}", m.start(3))
            toks.append(("op", ch, m.start(3)))
        pos = m.end()
    toks.append(("end", "", n))
    return toks


class _Parser:
    def __init__(self, src, allowed):
        self.src = src
        self.toks = _tokenize(src)
        self.k = 0
        self.allowed = allowed

    def peek(self):
        return self.toks[self.k]

    def take(self):
        tok = self.toks[self.k]
        self.k += 1
        return tok

    def expect(self, val):
        tok = self.take()
        if tok[1] != val or tok[0] == "end":
            raise ExprSyntaxError(f"expected {val!r}", tok[2])
        return tok

    def parse(self):
        if self.peek()[0] == "end":
            raise ExprSyntaxError("empty expression", 0)
        node = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ExprSyntaxError(f"unexpected {tok[1]!r}", tok[2])
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            pos = self.peek()[2]
            rhs = self.unary()
            if op == "/" and rhs == Num(0):
                raise ExprSyntaxError("division by literal zero", pos)
            node = BinOp(op, node, rhs)
        return node

    def unary(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] in "+-":
            self.take()
            arg = self.unary()
            return arg if tok[1] == "+" else Neg(arg)
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            sign = 1
            tok = self.peek()
            if tok[0] == "op" and tok[1] in "+-":
                self.take()
                sign = -1 if tok[1] == "-" else 1
            tok = self.take()
            if tok[0] == "op" and tok[1] == "(":
                # allow t^(-1)
                sign2 = 1
                t2 = self.peek()
                if t2[0] == "op" and t2[1] in "+-":
                    self.take()
                    sign2 = -1 if t2[1] == "-" else 1
                tok = self.take()
                if tok[0] != "num":
                    raise ExprSyntaxError("expected integer exponent", tok[2])
                self.expect(")")
                sign *= sign2
            elif tok[0] != "num":
                raise ExprSyntaxError("expected integer exponent", tok[2])
            e = sign * int(tok[1])
            if e < 0 and base == Num(0):
                raise ExprSyntaxError("division by literal zero", tok[2])
            return Pow(base, e)
        return base

    def atom(self):
        tok = self.take()
        kind, val, pos = tok
        if kind == "num":
            return Num(int(val))
        if kind == "id":
            if val in (T_SYMBOL, I_SYMBOL) or val in self.allowed:
                return Sym(val)
            raise UnknownSymbol(val, pos)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        if kind == "end":
            raise ExprSyntaxError("unexpected end of input", pos)
        raise ExprSyntaxError(f"unexpected {val!r}", pos)


def parse_scalar(src: str, allowed_params=()) -> ScalarExpr:
    """Parse ``src`` into an expression tree.  Identifiers other than ``t``,
    ``i`` and ``allowed_params`` raise :class:`UnknownSymbol`."""
    if not src or not src.strip():
        raise ExprSyntaxError("empty expression", 0)
    return _Parser(src, frozenset(allowed_params)).parse()


def evaluate(node: ScalarExpr) -> Scalar:
    if isinstance(node, Num):
        return GaussianRational(node.value)
    if isinstance(node, Sym):
        if node.name == I_SYMBOL:
            return I
        if node.name == T_SYMBOL:
            return LaurentPoly.t(1)
        return ParamRational.var(node.name)
    if isinstance(node, Neg):
        return -evaluate(node.arg)
    if isinstance(node, Pow):
        return as_scalar(evaluate(node.base)) ** node.exp
    a = evaluate(node.left)
    b = evaluate(node.right)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    return a / b


def scalar(src, allowed_params=()) -> Scalar:
    """Parse and evaluate in one go."""
    if not isinstance(src, str):
        return as_scalar(src)
    return as_scalar(evaluate(parse_scalar(src, allowed_params)))


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def format_expr(node: ScalarExpr, parent=0, right=False) -> str:
    """Print an expression tree with the minimal parentheses needed for
    :func:`parse_scalar` to rebuild the same tree."""
    if isinstance(node, Num):
        return str(node.value)
    if isinstance(node, Sym):
        return node.name
    if isinstance(node, Neg):
        s = "-" + format_expr(node.arg, 3)
        return f"({s})" if parent >= 2 else s
    if isinstance(node, Pow):
        base = format_expr(node.base, 4)
        if isinstance(node.base, Pow):
            base = f"({base})"
        return f"{base}^{node.exp}"
    p = _PREC[node.op]
    s = f"{format_expr(node.left, p)} {node.op} {format_expr(node.right, p, True)}"
    if p < parent or (p == parent and right):
        return f"({s})"
    return s


def to_text(x) -> str:
    return str(as_scalar(x))


def parse_gaussian(src: str) -> GaussianRational:
    """Parse a parameter-free literal like ``1/2``, ``-3+2*i``."""
    v = scalar(src)
    if not isinstance(v, GaussianRational):
        raise ExprSyntaxError(f"{src!r} is not a Gaussian rational literal", 0)
    return v
