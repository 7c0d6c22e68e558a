"""Algebras given by structure constants, identity checks, linear invariants,
base change and limits at ``t = 0``.

Indices are 0-based internally: ``c[i][j][k]`` is the coefficient of
``e_{k+1}`` in ``e_{i+1} e_{j+1}``.  Text formats and user-facing messages are
1-based.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from itertools import product as iproduct
from typing import Sequence

from . import linalg
from .linalg import Subspace
from .scalar import (
    ONE,
    ZERO,
    LaurentPoly,
    ParamRational,
    as_laurent,
    as_scalar,
    evaluate,
    format_term,
    join_terms,
    params_of,
    parse_scalar,
    specialize,
)

MAX_DIM = 4


class AlgebraError(ValueError):
    pass


class DimensionMismatch(AlgebraError):
    pass


class SingularBasis(AlgebraError):
    pass


class NegativeExponent(AlgebraError):
    def __init__(self, offending):
        self.offending = list(offending)
        desc = ", ".join(f"c[{i + 1}][{j + 1}][{k + 1}] has t^{e}" for i, j, k, e in self.offending)
        super().__init__(f"negative t-exponents: {desc}")


class AlgebraFormatError(AlgebraError):
    pass


def _freeze(c, n):
    return tuple(tuple(tuple(as_scalar(c[i][j][k]) for k in range(n)) for j in range(n)) for i in range(n))


@dataclass(frozen=True)
class Algebra:
    dim: int
    c: tuple
    params: tuple = ()
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if not 1 <= self.dim <= MAX_DIM:
            raise AlgebraError(f"dimension {self.dim} outside 1..{MAX_DIM}")
        object.__setattr__(self, "c", _freeze(self.c, self.dim))
        declared = set(self.params)
        used = set()
        for x in self.entries():
            used |= params_of(x)
        extra = used - declared
        if extra:
            raise AlgebraError(f"undeclared parameters {sorted(extra)}")
        object.__setattr__(self, "params", tuple(sorted(declared)))

    @classmethod
    def zero(cls, n, name=None):
        return cls(n, [[[ZERO] * n for _ in range(n)] for _ in range(n)], (), name)

    @classmethod
    def from_products(cls, n, products, params=(), anticommutative=False, name=None):
        """``products`` maps 1-based ``(i, j)`` to a coefficient vector or to a
        ``{k: coeff}`` dict (1-based ``k``)."""
        c = [[[ZERO] * n for _ in range(n)] for _ in range(n)]
        for (i, j), vec in products.items():
            if isinstance(vec, dict):
                row = [ZERO] * n
                for k, v in vec.items():
                    row[k - 1] = as_scalar(v)
            else:
                row = [as_scalar(v) for v in vec]
            c[i - 1][j - 1] = row
            if anticommutative:
                if i == j and any(row):
                    raise AlgebraError("anticommutative square must vanish")
                c[j - 1][i - 1] = [-x for x in row]
        return cls(n, c, tuple(params), name)

    @classmethod
    def from_text(cls, text, **kw):
        return parse_algebra(text, **kw)

    def entries(self):
        n = self.dim
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    yield self.c[i][j][k]

    def row(self, i, j):
        return self.c[i][j]

    def is_parametric(self):
        return bool(self.params)

    def with_name(self, name):
        return Algebra(self.dim, self.c, self.params, name)

    def specialize(self, bindings):
        b = {k: v for k, v in bindings.items() if k in self.params}
        if not b:
            return self
        n = self.dim
        c = [[[specialize(self.c[i][j][k], b) for k in range(n)] for j in range(n)] for i in range(n)]
        params = tuple(p for p in self.params if p not in b)
        for x in (v for r in c for rr in r for v in rr):
            params = tuple(sorted(set(params) | params_of(x)))
        return Algebra(n, c, params, self.name)

    def __str__(self):
        return format_algebra(self)


@dataclass(frozen=True)
class ParametrizedAlgebra(Algebra):
    """Structure constants that are Laurent polynomials in ``t``."""

    def __post_init__(self):
        object.__setattr__(self, "c", _freeze(self.c, self.dim))
        used = set()
        for x in self.entries():
            used |= params_of(x)
        object.__setattr__(self, "params", tuple(sorted(set(self.params) | used)))

    def t_range(self):
        lo, hi = None, None
        for x in self.entries():
            lp = as_laurent(x)
            if lp.terms:
                a, b = lp.min_exp(), lp.max_exp()
                lo = a if lo is None else min(lo, a)
                hi = b if hi is None else max(hi, b)
        return lo, hi


# --------------------------------------------------------------------------
# products and identities


def product(A: Algebra, x: Sequence, y: Sequence):
    n = A.dim
    if len(x) != n or len(y) != n:
        raise DimensionMismatch(f"vectors must have length {n}")
    out = [ZERO] * n
    for i in range(n):
        if not x[i]:
            continue
        for j in range(n):
            if not y[j]:
                continue
            f = x[i] * y[j]
            row = A.c[i][j]
            for k in range(n):
                if row[k]:
                    out[k] = out[k] + f * row[k]
    return tuple(as_scalar(v) for v in out)


def basis_vector(n, i):
    return tuple(ONE if k == i else ZERO for k in range(n))


class IdentityKind(enum.Enum):
    ANTICOMMUTATIVE = "anticommutative"
    LEIBNIZ = "leibniz"
    JACOBI = "jacobi"
    LIE = "lie"


@dataclass(frozen=True)
class IdentityResult:
    holds: bool
    counterexample: tuple | None = None  # 1-based basis indices
    value: tuple | None = None

    def __bool__(self):
        return self.holds


def _vadd(*vs):
    n = len(vs[0])
    return tuple(as_scalar(sum((v[k] for v in vs[1:]), vs[0][k])) for k in range(n))


def _vneg(v):
    return tuple(-x for x in v)


def check_identity(A: Algebra, kind) -> IdentityResult:
    """Check a multilinear identity on all basis tuples.  Multilinearity makes
    this equivalent to the identity holding on all vectors.  Parametric
    algebras are checked generically (as rational functions)."""
    kind = IdentityKind(kind)
    n = A.dim
    e = [basis_vector(n, i) for i in range(n)]
    if kind is IdentityKind.LIE:
        r = check_identity(A, IdentityKind.ANTICOMMUTATIVE)
        return r if not r else check_identity(A, IdentityKind.JACOBI)
    if kind is IdentityKind.ANTICOMMUTATIVE:
        for i in range(n):
            for j in range(i, n):
                v = _vadd(A.c[i][j], A.c[j][i]) if i != j else A.c[i][i]
                if any(v):
                    return IdentityResult(False, (i + 1, j + 1), v)
        return IdentityResult(True)
    mul = lambda x, y: product(A, x, y)  # noqa: E731
    for i, j, k in iproduct(range(n), repeat=3):
        x, y, z = e[i], e[j], e[k]
        if kind is IdentityKind.LEIBNIZ:
            v = _vadd(mul(mul(x, y), z), _vneg(mul(mul(x, z), y)), _vneg(mul(x, mul(y, z))))
        else:
            v = _vadd(mul(mul(x, y), z), mul(mul(y, z), x), mul(mul(z, x), y))
        if any(v):
            return IdentityResult(False, (i + 1, j + 1, k + 1), v)
    return IdentityResult(True)


def is_anticommutative(A):
    return check_identity(A, IdentityKind.ANTICOMMUTATIVE).holds


def is_leibniz(A):
    return check_identity(A, IdentityKind.LEIBNIZ).holds


def is_lie(A):
    return check_identity(A, IdentityKind.LIE).holds


# --------------------------------------------------------------------------
# linear invariants


@dataclass(frozen=True)
class DerivationSpace:
    dim: int
    basis: tuple  # each element an n x n matrix (row i = image of e_i)


def derivation_space(A: Algebra) -> DerivationSpace:
    """Solve D(xy) = D(x)y + xD(y) for D, generically in the parameters."""
    n = A.dim
    c = A.c
    rows = []
    for i, j, l in iproduct(range(n), repeat=3):
        row = [ZERO] * (n * n)
        for k in range(n):
            if c[i][j][k]:
                row[k * n + l] = row[k * n + l] + c[i][j][k]
        for m in range(n):
            if c[m][j][l]:
                row[i * n + m] = row[i * n + m] - c[m][j][l]
            if c[i][m][l]:
                row[j * n + m] = row[j * n + m] - c[i][m][l]
        if any(row):
            rows.append(row)
    ns = linalg.nullspace(rows, n * n)
    mats = tuple(tuple(tuple(v[a * n + b] for b in range(n)) for a in range(n)) for v in ns)
    return DerivationSpace(len(ns), mats)


def derivation_dim(A: Algebra) -> int:
    return derivation_space(A).dim


def left_annihilator(A: Algebra) -> Subspace:
    """``{a : x a = 0 for all x}``."""
    n = A.dim
    rows = []
    for x in range(n):
        for k in range(n):
            row = [A.c[x][j][k] for j in range(n)]
            if any(row):
                rows.append(row)
    return Subspace(linalg.nullspace(rows, n), n)


def plus_square(A: Algebra) -> Subspace:
    """Span of ``xy + yx``."""
    n = A.dim
    vecs = [_vadd(A.c[i][j], A.c[j][i]) for i in range(n) for j in range(i, n)]
    return Subspace([v for v in vecs if any(v)], n)


def square(A: Algebra) -> Subspace:
    """Span of all products ``xy``."""
    n = A.dim
    vecs = [A.c[i][j] for i in range(n) for j in range(n)]
    return Subspace([v for v in vecs if any(v)], n)


def subspace_product(A: Algebra, U: Subspace, W: Subspace) -> Subspace:
    vecs = [product(A, u, w) for u in U.rows for w in W.rows]
    return Subspace([v for v in vecs if any(v)], A.dim)


def subspace_sum(U: Subspace, W: Subspace) -> Subspace:
    return Subspace(list(U.rows) + list(W.rows), U.ambient)


def full_space(n) -> Subspace:
    return Subspace([basis_vector(n, i) for i in range(n)], n)


def power_dims(A: Algebra, steps=None):
    """Dimensions of ``A^1, A^2, ...`` where ``A^k = sum_{i+j=k} A^i A^j``."""
    n = A.dim
    steps = steps or n + 1
    powers = {1: full_space(n)}
    for k in range(2, steps + 1):
        acc = Subspace([], n)
        for i in range(1, k):
            acc = subspace_sum(acc, subspace_product(A, powers[i], powers[k - i]))
        powers[k] = acc
    return tuple(powers[k].dim for k in range(1, steps + 1))


def derived_dims(A: Algebra):
    n = A.dim
    cur = full_space(n)
    out = [cur.dim]
    for _ in range(n):
        cur = subspace_product(A, cur, cur)
        out.append(cur.dim)
    return tuple(out)


def is_nilpotent(A: Algebra) -> bool:
    return power_dims(A, 2 * A.dim + 1)[-1] == 0


def is_solvable(A: Algebra) -> bool:
    return derived_dims(A)[-1] == 0


# --------------------------------------------------------------------------
# base change and limits


def _basis_matrix(M, n):
    if len(M) != n or any(len(r) != n for r in M):
        raise DimensionMismatch(f"basis matrix must be {n}x{n}")
    return [[as_scalar(x) for x in r] for r in M]


def change_basis(A: Algebra, M) -> ParametrizedAlgebra:
    """Structure constants of ``A`` in the basis ``E_i = sum_j M[i][j] e_j``.

    The inverse of ``M`` is taken as adjugate over determinant; every
    resulting constant must be a Laurent polynomial in ``t``."""
    n = A.dim
    M = _basis_matrix(M, n)
    d = linalg.det(M)
    if not d:
        raise SingularBasis("basis matrix is singular")
    adj = linalg.adjugate(M)
    c = A.c
    # e-coordinates of E_i E_j
    out = [[[ZERO] * n for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            v = [ZERO] * n
            for a in range(n):
                if not M[i][a]:
                    continue
                for b in range(n):
                    if not M[j][b]:
                        continue
                    f = M[i][a] * M[j][b]
                    row = c[a][b]
                    for k in range(n):
                        if row[k]:
                            v[k] = v[k] + f * row[k]
            if not any(v):
                continue
            for l in range(n):
                s = ZERO
                for k in range(n):
                    if v[k] and adj[k][l]:
                        s = s + v[k] * adj[k][l]
                out[i][j][l] = s / d if s else ZERO
    return ParametrizedAlgebra(n, out, A.params, None)


def limit_at_zero(P: Algebra) -> Algebra:
    """Constant terms of the structure constants; fails if any constant has a
    negative power of ``t``."""
    n = P.dim
    bad = []
    c = [[[ZERO] * n for _ in range(n)] for _ in range(n)]
    for i, j, k in iproduct(range(n), repeat=3):
        lp = as_laurent(P.c[i][j][k])
        neg = [e for e in lp.terms if e < 0]
        if neg:
            bad.append((i, j, k, min(neg)))
        c[i][j][k] = lp.coeff(0)
    if bad:
        raise NegativeExponent(bad)
    params = set()
    for x in (v for r in c for rr in r for v in rr):
        params |= params_of(x)
    return Algebra(n, c, tuple(sorted(params)))


# --------------------------------------------------------------------------
# text format

_HEADER = re.compile(r"^\s*(\w+)\s*=\s*(.*?)\s*$")
_PRODUCT = re.compile(r"^\s*e(\d+)\s*\*\s*e(\d+)\s*=\s*(.+?)\s*$")


def parse_param_list(s):
    s = s.strip()
    if s.startswith("[") and s.endswith("]"):
        s = s[1:-1]
    return tuple(p.strip() for p in s.split(",") if p.strip())


def linear_combination(src, names, params=(), allow_t=True):
    """Parse ``src`` as a linear combination of the symbols ``names`` with
    scalar coefficients; returns the coefficient list."""
    tree = parse_scalar(src, tuple(params) + tuple(names))
    value = evaluate(tree)
    if not allow_t and isinstance(as_scalar(value), LaurentPoly):
        raise AlgebraFormatError(f"{src!r}: t is not allowed here")
    coeffs = []
    for name in names:
        coeffs.append(specialize(value, {m: (ONE if m == name else ZERO) for m in names}))
    rebuilt = ZERO
    for name, cf in zip(names, coeffs):
        rebuilt = rebuilt + cf * ParamRational.var(name)
    if as_scalar(rebuilt - value):
        raise AlgebraFormatError(f"{src!r} is not a linear combination of {', '.join(names)}")
    for cf in coeffs:
        stray = params_of(cf) & set(names)
        if stray:
            raise AlgebraFormatError(f"{src!r} is not linear in {sorted(stray)}")
    return coeffs


def parse_algebra(text, anticommutative=None, name=None) -> Algebra:
    """Read the line-oriented algebra format::

        dim = 3
        params = [alpha]
        mode = anticommutative
        e1*e3 = (alpha)*e1 + e2
    """
    dim = None
    params = ()
    mode = "general"
    prods = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _PRODUCT.match(line)
        if m:
            prods.append((int(m.group(1)), int(m.group(2)), m.group(3), lineno))
            continue
        m = _HEADER.match(line)
        if not m:
            raise AlgebraFormatError(f"line {lineno}: cannot parse {raw!r}")
        key, val = m.group(1), m.group(2)
        if key == "dim":
            dim = int(val)
        elif key == "params":
            params = parse_param_list(val)
        elif key == "mode":
            mode = val.strip().lower()
        elif key == "name":
            name = name or val.strip()
        else:
            raise AlgebraFormatError(f"line {lineno}: unknown header {key!r}")
    if dim is None:
        raise AlgebraFormatError("missing 'dim = n' header")
    if mode not in ("general", "anticommutative"):
        raise AlgebraFormatError(f"unknown mode {mode!r}")
    anti = (mode == "anticommutative") if anticommutative is None else anticommutative
    names = tuple(f"e{k}" for k in range(1, dim + 1))
    c = [[[ZERO] * dim for _ in range(dim)] for _ in range(dim)]
    given = set()
    for i, j, rhs, lineno in prods:
        if not (1 <= i <= dim and 1 <= j <= dim):
            raise AlgebraFormatError(f"line {lineno}: index out of range")
        try:
            vec = linear_combination(rhs, names, params, allow_t=False)
        except Exception as exc:
            raise AlgebraFormatError(f"line {lineno}: {exc}") from exc
        if (i, j) in given:
            raise AlgebraFormatError(f"line {lineno}: product e{i}*e{j} given twice")
        given.add((i, j))
        c[i - 1][j - 1] = vec
        if anti:
            if i == j and any(vec):
                raise AlgebraFormatError(f"line {lineno}: e{i}*e{i} must vanish in anticommutative mode")
            neg = [-x for x in vec]
            if (j, i) in given and i != j and c[j - 1][i - 1] != neg and list(c[j - 1][i - 1]) != neg:
                raise AlgebraFormatError(f"line {lineno}: inconsistent with e{j}*e{i}")
            if (j, i) not in given:
                c[j - 1][i - 1] = neg
    return Algebra(dim, c, params, name)


def format_vector(v, names=None):
    names = names or [f"e{k}" for k in range(1, len(v) + 1)]
    return join_terms(format_term(x, nm) for x, nm in zip(v, names) if x)


def format_algebra(A: Algebra, anticommutative=False) -> str:
    lines = []
    if A.name:
        lines.append(f"name = {A.name}")
    lines.append(f"dim = {A.dim}")
    if A.params:
        lines.append(f"params = [{', '.join(A.params)}]")
    if anticommutative:
        lines.append("mode = anticommutative")
    n = A.dim
    for i in range(n):
        for j in range(n):
            if anticommutative and j <= i:
                continue
            v = A.c[i][j]
            if any(v):
                lines.append(f"e{i + 1}*e{j + 1} = {format_vector(v)}")
    return "\n".join(lines) + "\n"
