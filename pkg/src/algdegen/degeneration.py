"""Degeneration certificates (parametrized bases, optionally with a
parametrized index), their exact verification, the built-in certificate
tables, orbit dimensions and a bounded certificate search."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import lru_cache

import sympy as sp

from . import catalog, linalg
from .algebra import (
    Algebra,
    DimensionMismatch,
    NegativeExponent,
    SingularBasis,
    change_basis,
    derivation_dim,
    format_vector,
    limit_at_zero,
    linear_combination,
    parse_param_list,
)
from .catalog import CatalogRef
from .scalar import (
    ONE,
    ZERO,
    GaussianRational,
    LaurentPoly,
    NonLaurentQuotient,
    ParamRational,
    SpecializationPole,
    as_laurent,
    as_scalar,
    params_of,
    scalar,
    specialize,
    to_text,
)


class CertificateError(ValueError):
    pass


class LimitMismatch(CertificateError):
    def __init__(self, positions, limit):
        self.positions = positions  # 1-based (i, j, k)
        self.limit = limit
        super().__init__(f"limit differs from target at {positions}")


class CertificateFormatError(CertificateError):
    pass


class NotFound(LookupError):
    """Certificate search exhausted its budget; not a non-degeneration claim."""


@dataclass(frozen=True)
class Side:
    """One end of a certificate: a catalog name with an optional parameter
    value, which may be an expression in the certificate's free parameters."""

    name: str
    value: object = None

    def __post_init__(self):
        e = catalog.entry(self.name)
        if self.value is not None:
            if not e.is_family:
                raise CertificateFormatError(f"{self.name} takes no parameter")
            object.__setattr__(self, "value", as_scalar(self.value))

    @property
    def entry(self):
        return catalog.entry(self.name)

    def algebra(self) -> Algebra:
        A = catalog.get(CatalogRef(self.name))
        if self.value is None:
            return A
        return A.specialize({self.entry.param: self.value})

    def node(self):
        """Graph node this side denotes: a CatalogRef, or the generic family
        node when the value is left free or depends on parameters."""
        if self.value is None or not isinstance(self.value, GaussianRational):
            return CatalogRef(self.name)
        return CatalogRef(self.name, self.value)

    @property
    def is_generic(self):
        return self.entry.is_family and (self.value is None or not isinstance(self.value, GaussianRational))

    def specialize(self, bindings):
        if self.value is None:
            return self
        return Side(self.name, specialize(self.value, bindings))

    def __str__(self):
        if self.value is None:
            return self.name
        return f"{self.name}[{self.entry.param}={to_text(self.value)}]"


def side(x) -> Side | Algebra:
    if isinstance(x, (Side, Algebra)):
        return x
    if isinstance(x, CatalogRef):
        return Side(x.name, x.param)
    return parse_side(str(x))


def parse_side(text, params=()):
    text = text.strip()
    if "[" not in text:
        return Side(text)
    name, rest = text.split("[", 1)
    rest = rest.rstrip().rstrip("]")
    if "=" in rest:
        _, rest = rest.split("=", 1)
    return Side(name.strip(), scalar(rest.strip(), tuple(params)))


@dataclass(frozen=True)
class DegenerationCertificate:
    source: object  # Side or Algebra
    target: object  # Side or Algebra
    basis: tuple  # rows: E_i = sum_j basis[i][j] e_j
    index: tuple = ()  # ((param, LaurentPoly),)
    name: str = ""
    excluded: tuple = ()  # parameter values declared outside the claim
    note: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "source", side(self.source))
        object.__setattr__(self, "target", side(self.target))
        object.__setattr__(self, "basis", tuple(tuple(as_scalar(x) for x in row) for row in self.basis))
        if isinstance(self.index, dict):
            object.__setattr__(self, "index", tuple(sorted(self.index.items())))
        object.__setattr__(self, "index", tuple((k, as_laurent(v)) for k, v in self.index))
        object.__setattr__(self, "excluded", tuple(as_scalar(v) for v in self.excluded))
        if self.index:
            src = self.source
            if not (isinstance(src, Side) and src.entry.is_family and src.value is None):
                raise CertificateFormatError("a parametrized index needs a family source")

    @property
    def dim(self):
        return len(self.basis)

    @property
    def free_params(self):
        """Parameters left symbolic in the claim (not fixed by an index)."""
        names = set()
        for row in self.basis:
            for x in row:
                names |= params_of(x)
        for s in (self.source, self.target):
            if isinstance(s, Side):
                if s.value is not None:
                    names |= params_of(s.value)
                elif s.entry.is_family:
                    names.add(s.entry.param)
            else:
                names |= set(s.params)
        names -= {k for k, _ in self.index}
        return tuple(sorted(names))

    def source_algebra(self):
        return self.source.algebra() if isinstance(self.source, Side) else self.source

    def target_algebra(self):
        return self.target.algebra() if isinstance(self.target, Side) else self.target

    def instantiate(self, bindings) -> "DegenerationCertificate":
        """Certificate for specific values of the free parameters."""
        bindings = {k: as_scalar(v) for k, v in bindings.items()}
        src = self.source
        if isinstance(src, Side):
            if src.value is None and src.entry.is_family and src.entry.param in bindings and not self.index:
                src = Side(src.name, bindings[src.entry.param])
            else:
                src = src.specialize(bindings)
        tgt = self.target
        if isinstance(tgt, Side):
            if tgt.value is None and tgt.entry.is_family and tgt.entry.param in bindings:
                tgt = Side(tgt.name, bindings[tgt.entry.param])
            else:
                tgt = tgt.specialize(bindings)
        basis = tuple(tuple(specialize(x, bindings) for x in row) for row in self.basis)
        label = ", ".join(f"{k}={v}" for k, v in sorted(bindings.items()))
        return DegenerationCertificate(src, tgt, basis, self.index, f"{self.name}[{label}]" if self.name else "")

    def __str__(self):
        return format_certificate(self)


@dataclass(frozen=True)
class ExceptionSet:
    """Parameter values where a family certificate breaks down; ``factors``
    lists irreducible factors without roots in Q(i)."""

    param: str | None = None
    values: tuple = ()
    factors: tuple = ()

    def __contains__(self, v):
        return as_scalar(v) in self.values

    def __len__(self):
        return len(self.values) + len(self.factors)

    def __bool__(self):
        return bool(self.values or self.factors)

    def as_set(self):
        return set(self.values)

    def __str__(self):
        if not self:
            return "{}"
        items = [f"{self.param}={v}" for v in self.values] + [f"{f}=0" for f in self.factors]
        return "{" + ", ".join(items) + "}"


@dataclass(frozen=True)
class Report:
    certificate: DegenerationCertificate
    valid: bool
    exceptions: ExceptionSet
    limit: Algebra | None
    error: str = ""

    def __bool__(self):
        return self.valid


# --------------------------------------------------------------------------
# verification


def _scalars(x):
    """Field coefficients inside a scalar (Laurent coefficients unpacked)."""
    x = as_scalar(x)
    if isinstance(x, LaurentPoly):
        return list(x.terms.values())
    return [x]


def _sympy_poly(terms, names):
    syms = sp.symbols(names)
    expr = 0
    for m, c in terms.items():
        term = sp.Rational(str(c.re)) + sp.I * sp.Rational(str(c.im))
        for s, k in zip(syms, m):
            term *= s**k
        expr += term
    return sp.Poly(expr, *syms, domain="QQ_I")


def _poly_of(x: ParamRational, names, part):
    terms = x.numerator_terms() if part == "num" else x.denominator_terms()
    full = {}
    for m, c in terms.items():
        e = [0] * len(names)
        for v, k in zip(x.vars, m):
            e[names.index(v)] = k
        full[tuple(e)] = c
    return _sympy_poly(full, names)


def exception_set(cert: DegenerationCertificate, scalars_seen, det) -> ExceptionSet:
    names = cert.free_params
    if not names:
        return ExceptionSet()
    if len(names) > 1:
        raise CertificateError("exception sets are computed for one free parameter")
    polys = []
    for x in scalars_seen:
        for c in _scalars(x):
            if isinstance(c, ParamRational) and not c.is_polynomial():
                polys.append(_poly_of(c, names, "den"))
    # values where the basis determinant vanishes identically in t
    g = None
    for c in _scalars(det):
        if isinstance(c, ParamRational):
            p = _poly_of(c, names, "num")
        else:
            p = None
        if p is None:
            g = None
            break
        g = p if g is None else g.gcd(p)
    else:
        if g is not None and g.degree() > 0:
            polys.append(g)
    values, factors = set(), set()
    for p in polys:
        for f, _ in p.factor_list()[1]:
            if f.degree() == 1:
                a, b = f.all_coeffs()
                r = sp.nsimplify(-sp.sympify(b) / sp.sympify(a))
                values.add(GaussianRational(_frac(sp.re(r)), _frac(sp.im(r))))
            elif f.degree() > 1:
                factors.add(str(f.as_expr()))
    return ExceptionSet(names[0], tuple(sorted(values, key=lambda g: (g.re, g.im))), tuple(sorted(factors)))


def _frac(x):
    from fractions import Fraction

    return Fraction(str(x))


def verify_certificate(cert: DegenerationCertificate, raise_errors=False) -> Report:
    """Check that the source, written in the parametrized basis, has Laurent
    constants without negative powers of ``t`` and limit equal to the target
    at ``t = 0``, symbolically in the free parameters."""
    try:
        return _verify(cert)
    except (CertificateError, SingularBasis, NegativeExponent, NonLaurentQuotient, DimensionMismatch) as exc:
        if raise_errors:
            raise
        return Report(cert, False, ExceptionSet(), None, f"{type(exc).__name__}: {exc}")


def _verify(cert):
    S = cert.source_algebra()
    T = cert.target_algebra()
    n = S.dim
    if T.dim != n or cert.dim != n:
        raise DimensionMismatch("source, target and basis dimensions differ")
    if cert.index:
        S = S.specialize(dict(cert.index))
    extra = set(cert.free_params) - set(S.params)
    if extra:
        S = Algebra(n, S.c, tuple(sorted(set(S.params) | extra)), S.name)
    M = [list(r) for r in cert.basis]
    det = linalg.det(M)
    if not det:
        raise SingularBasis("basis determinant is identically zero")
    P = change_basis(S, M)
    L = limit_at_zero(P)
    bad = []
    for i, j, k in itertools.product(range(n), repeat=3):
        if L.c[i][j][k] != as_scalar(T.c[i][j][k]):
            bad.append((i + 1, j + 1, k + 1))
    if bad:
        raise LimitMismatch(bad, L)
    seen = [x for row in cert.basis for x in row] + list(P.entries()) + list(T.entries())
    exc = exception_set(cert, seen, det)
    return Report(cert, True, exc, L)


# --------------------------------------------------------------------------
# text format


_LINE = re.compile(r"^\s*([A-Za-z]\w*)(?:\s+(\w+))?\s*=\s*(.*?)\s*$")


def parse_certificate(text, name="") -> DegenerationCertificate:
    """Read the certificate text format::

        source = L4
        target = L1[beta=(1-alpha)/(2-alpha)^2]
        E1 = (t^2)*e1
        E2 = (t/(2-alpha))*e1 + ((1-alpha+t)*t/(2-alpha))*e3
        E3 = (1/(2-alpha))*e2 + (t)*e3
        index alpha = 1/t        (optional)
        exclude = 2              (optional, comma separated)
        params = [alpha]         (optional, inferred from the source)
    """
    fields = {}
    rows = {}
    index = {}
    params = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _LINE.match(line)
        if not m:
            raise CertificateFormatError(f"line {lineno}: cannot parse {raw!r}")
        key, sub, val = m.group(1), m.group(2), m.group(3)
        if key == "index":
            if not sub:
                raise CertificateFormatError(f"line {lineno}: index needs a parameter name")
            index[sub] = val
        elif re.fullmatch(r"E\d+", key):
            rows[int(key[1:])] = (val, lineno)
        elif key in ("source", "target", "name", "exclude", "note"):
            fields[key] = val
        elif key == "params":
            params = parse_param_list(val)
        else:
            raise CertificateFormatError(f"line {lineno}: unknown key {key!r}")
    for req in ("source", "target"):
        if req not in fields:
            raise CertificateFormatError(f"missing '{req} = ...'")
    if not rows:
        raise CertificateFormatError("no basis vectors given")
    n = max(rows)
    if sorted(rows) != list(range(1, n + 1)):
        raise CertificateFormatError("basis vectors must be E1..En")
    src = parse_side(fields["source"], params or ())
    if params is None:
        params = (src.entry.param,) if src.entry.is_family and src.value is None else ()
    params = tuple(params)
    tgt = parse_side(fields["target"], params)
    names = tuple(f"e{k}" for k in range(1, n + 1))
    basis = []
    for k in range(1, n + 1):
        val, lineno = rows[k]
        try:
            basis.append(linear_combination(val, names, params, allow_t=True))
        except Exception as exc:
            raise CertificateFormatError(f"line {lineno}: {exc}") from exc
    idx = {k: scalar(v) for k, v in index.items()}
    excl = tuple(scalar(v.strip()) for v in fields.get("exclude", "").split(",") if v.strip())
    return DegenerationCertificate(src, tgt, basis, idx, fields.get("name", name), excl, fields.get("note", ""))


def format_certificate(cert: DegenerationCertificate) -> str:
    lines = []
    if cert.name:
        lines.append(f"name = {cert.name}")
    lines.append(f"source = {cert.source if isinstance(cert.source, Side) else cert.source.name or '<algebra>'}")
    lines.append(f"target = {cert.target if isinstance(cert.target, Side) else cert.target.name or '<algebra>'}")
    fp = cert.free_params
    if fp:
        lines.append(f"params = [{', '.join(fp)}]")
    for i, row in enumerate(cert.basis, 1):
        lines.append(f"E{i} = {format_vector(row)}")
    for k, v in cert.index:
        lines.append(f"index {k} = {to_text(v)}")
    if cert.excluded:
        lines.append("exclude = " + ", ".join(str(v) for v in cert.excluded))
    return "\n".join(lines)


# --------------------------------------------------------------------------
# built-in certificate suites

_SUITE_A3 = """
name = a3.1
source = L1
target = L2
E1 = e1
E2 = t*e2
E3 = e3

name = a3.2
source = L1[beta=1/4]
target = g1
E1 = t^3*e1
E2 = -2*t*e2 + t*e3
E3 = 2*t^2*e2

name = a3.3
source = L3
target = L2
E1 = e1
E2 = t*e2
E3 = e3

name = a3.4
source = L4
target = L1[beta=(1-alpha)/(2-alpha)^2]
E1 = t^2*e1
E2 = (t/(2-alpha))*e1 + ((1-alpha+t)*t/(2-alpha))*e3
E3 = (1/(2-alpha))*e2 + t*e3
exclude = 2

name = a3.5
source = L4[alpha=0]
target = g3[alpha=0]
E1 = -t^-1*e1 + t*e2
E2 = t^-1*e1
E3 = e3

name = a3.6
source = L4[alpha=2]
target = L3
E1 = t^2*e1
E2 = i*t*e1 + e2 - i*t*e3
E3 = t*e3

name = a3.7
source = L5
target = L4[alpha=2]
E1 = t*e1
E2 = t*e2
E3 = ((t-1)/2)*e1 + e3

name = a3.8
source = L6[alpha=0]
target = L1[beta=0]
E1 = t^2*e2
E2 = t*e3
E3 = t*e1 + t*e2 + t*e3

name = a3.9
source = L6[alpha=1]
target = L2
E1 = t*e1
E2 = e2
E3 = e1 + t*e3

name = a3.10
source = L6
target = L8
E1 = e1 + t*e2
E2 = (alpha-1)*t*e1
E3 = (1/alpha)*t^-1*e1 + e2 + t*e3
exclude = 0, 1

name = a3.11
source = L7
target = L6[alpha=1]
E1 = t*e1
E2 = e2
E3 = e3

name = a3.12
source = L7
target = L8
E1 = e1 + e2
E2 = t*e2
E3 = t^-1*e1 + t*e3

name = a3.13
source = L8
target = L1[beta=0]
E1 = t*e2
E2 = t*e3
E3 = e1 + t*e3

name = a3.14
source = L9
target = L6[alpha=0]
E1 = t^-1*e1
E2 = t^-2*e2
E3 = e3

name = a3.15
source = L9
target = L8
E1 = t^2*e1
E2 = t^3*e2
E3 = t*e3
"""

_SUITE_A5 = """
name = a5.1
source = L4
target = L6[alpha=0]
E1 = e2
E2 = e1
E3 = t*e3
index alpha = t^-1

name = a5.2
source = L6
target = L7
E1 = e1 + e2
E2 = t*e2
E3 = e3
index alpha = 1 - t

name = a5.3
source = L6
target = L9
E1 = e1 + t*e2
E2 = (1-t)*e1
E3 = e1 + e2 + t*e3
index alpha = t^-1

name = a5.4
source = L1
target = L3
E1 = t^4*e1
E2 = t^3*e2
E3 = t^2*e3
index beta = t^-2
"""

_SUITE_SEC4 = """
name = sec4.1
source = A2
target = g3[alpha=alpha]
params = [alpha]
E1 = t*e3
E2 = t*e1
E3 = e1 + (alpha+t)*e2 + e3

name = sec4.2
source = A1
target = A2
E1 = t*e2
E2 = -e1
E3 = alpha*e1 - e2 + e3
"""

# Lie and anticommutative degenerations needed for the graphs, derived by
# hand or by search_certificate and checked like the others.
_SUITE_DERIVED = """
name = derived.1
source = g3
target = g1
E1 = t*e1 + t*e2
E2 = e1
E3 = t*e3

name = derived.2
source = g3[alpha=1]
target = g2
E1 = e1
E2 = t^-1*e2
E3 = e3

name = derived.3
source = g4
target = g3[alpha=-1]
E1 = (1 - t/2)*e2 + (i + i*t/2)*e3
E2 = t*e2 - i*t*e3
E3 = -i*e1

name = derived.4
source = A3
target = g2
E1 = t*e1
E2 = t*e2
E3 = e3

name = derived.5
source = A3
target = g1
E1 = t*e3
E2 = t^-2*e1
E3 = t^3*e2

name = derived.6
source = A3
target = g3[alpha=1]
E1 = t^-1*e1
E2 = t^3*e2
E3 = i*t^2*e2 + e3
"""

SUITES = {"a3": _SUITE_A3, "a5": _SUITE_A5, "sec4": _SUITE_SEC4, "derived": _SUITE_DERIVED}


def parse_certificates(text):
    blocks = [b for b in re.split(r"\n\s*\n", text.strip()) if b.strip()]
    return [parse_certificate(b) for b in blocks]


@lru_cache(maxsize=None)
def table(name) -> tuple:
    try:
        return tuple(parse_certificates(SUITES[name]))
    except KeyError:
        raise KeyError(f"unknown certificate suite {name!r}; choose from {sorted(SUITES)}") from None


def builtin_certificates():
    out = []
    for name in SUITES:
        out.extend(table(name))
    return out


def verify_table(name):
    return [verify_certificate(c) for c in table(name)]


def zero_certificate(ref) -> DegenerationCertificate:
    """``E_i = t e_i`` sends every algebra to the zero algebra."""
    src = side(ref)
    n = 3
    basis = [[LaurentPoly.t(1) if i == j else ZERO for j in range(n)] for i in range(n)]
    return DegenerationCertificate(src, Side("C3"), basis, name=f"zero({src})")


def member_certificate(name, value) -> DegenerationCertificate:
    """A family degenerates to each of its members: identity basis with a
    constant index."""
    e = catalog.entry(name)
    ident = [[ONE if i == j else ZERO for j in range(3)] for i in range(3)]
    return DegenerationCertificate(Side(name), Side(name, value), ident, {e.param: LaurentPoly.const(value)},
                                   name=f"member({name}={value})")


# --------------------------------------------------------------------------
# orbit dimensions and search


def orbit_dimension(x) -> int:
    """``n^2 - dim Der`` for an algebra or concrete ref; a generic family node
    adds one for its parameter."""
    if isinstance(x, Algebra):
        if x.params:
            return x.dim**2 - derivation_dim(x) + len(x.params)
        return x.dim**2 - derivation_dim(x)
    ref = x if isinstance(x, CatalogRef) else catalog.parse_ref(str(x))
    A = catalog.get(ref)
    d = derivation_dim(A)
    if ref.is_generic:
        return A.dim**2 - d + 1
    return A.dim**2 - d


@dataclass
class SearchBudget:
    exponents: tuple = (-2, -1, 0, 1, 2, 3, 4)
    coefficients: tuple = (1, -1, 2, -2, "1/2", "i", "-i")
    max_extra_terms: int = 1
    max_candidates: int = 200000


def _diag_hit(S, T, perm, ks):
    n = S.dim
    c, d = S.c, T.c
    for i in range(n):
        for j in range(n):
            for m in range(n):
                v = c[perm[i]][perm[j]][perm[m]]
                e = ks[i] + ks[j] - ks[m]
                if v:
                    if e < 0:
                        return False
                    if e == 0 and v != d[i][j][m]:
                        return False
                    if e > 0 and d[i][j][m]:
                        return False
                elif d[i][j][m] and True:
                    return False
    return True


def search_certificate(A, B, budget: SearchBudget | None = None) -> DegenerationCertificate:
    """Enumerate monomial basis templates ``E_i = c t^k e_sigma(i)`` (plus up
    to ``max_extra_terms`` extra monomial terms) and return the first one that
    verifies.  Only concrete (parameter-free) algebras are searched."""
    budget = budget or SearchBudget()
    sa, sb = side(A), side(B)
    S = sa.algebra() if isinstance(sa, Side) else sa
    T = sb.algebra() if isinstance(sb, Side) else sb
    if S.params or T.params:
        raise ValueError("search_certificate needs concrete algebras")
    n = S.dim
    if T.dim != n:
        raise DimensionMismatch("dimensions differ")
    count = 0
    perms = list(itertools.permutations(range(n)))
    exps = budget.exponents
    # pure monomial bases: structure constants scale as t^(k_i + k_j - k_m)
    for perm in perms:
        for ks in itertools.product(exps, repeat=n):
            count += 1
            if _diag_hit(S, T, perm, ks):
                basis = [[LaurentPoly.t(ks[i]) if j == perm[i] else ZERO for j in range(n)] for i in range(n)]
                cert = DegenerationCertificate(sa, sb, basis, name=f"search({sa}->{sb})")
                if verify_certificate(cert).valid:
                    return cert
    coeffs = [scalar(str(c)) for c in budget.coefficients]
    for extra in range(1, budget.max_extra_terms + 1):
        small = tuple(e for e in exps if -1 <= e <= 3)
        for perm in perms:
            for ks in itertools.product(small, repeat=n):
                slots = [(i, j) for i in range(n) for j in range(n) if j != perm[i]]
                for chosen in itertools.combinations(slots, extra):
                    for adds in itertools.product(itertools.product(coeffs, small), repeat=extra):
                        count += 1
                        if count > budget.max_candidates:
                            raise NotFound(f"no certificate within {budget.max_candidates} candidates")
                        basis = [[LaurentPoly.t(ks[i]) if j == perm[i] else ZERO for j in range(n)] for i in range(n)]
                        for (i, j), (cf, k) in zip(chosen, adds):
                            basis[i][j] = cf * LaurentPoly.t(k)
                        cert = DegenerationCertificate(sa, sb, basis, name=f"search({sa}->{sb})")
                        try:
                            ok = verify_certificate(cert).valid
                        except SpecializationPole:
                            ok = False
                        if ok:
                            return cert
    raise NotFound(f"no certificate among {count} templates")


def build_graph(variety, **kw):
    from .graph import build_graph as _build

    return _build(variety, **kw)


def components(graph):
    from .graph import components as _components

    return _components(graph)


def primary_reduction(graph):
    from .graph import primary_reduction as _reduce

    return _reduce(graph)
