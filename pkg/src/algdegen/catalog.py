"""Built-in three-dimensional anticommutative and Leibniz algebras, the
anticommutative <-> bilinear-form correspondence, the 4-dimensional lift, and
identification of user algebras up to isomorphism."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

from . import linalg
from .algebra import (
    Algebra,
    derivation_dim,
    derived_dims,
    format_algebra,
    is_anticommutative,
    is_leibniz,
    left_annihilator,
    parse_algebra,
    plus_square,
    power_dims,
    square,
)
from .groebner import Budget, MPoly
from .scalar import ONE, ZERO, GaussianRational, as_scalar, params_of, scalar, specialize
from .solve import Inconclusive, has_solution, parameter_values


class CatalogError(LookupError):
    pass


class UnknownName(CatalogError):
    pass


class ParameterRequired(CatalogError):
    pass


class NotAnticommutative(ValueError):
    pass


class Unknown(LookupError):
    """No catalog entry is isomorphic to the given algebra."""


class Variety(enum.Enum):
    ACOM3 = "acom3"
    LEIB3 = "leib3"
    LIE3 = "lie3"


@dataclass(frozen=True)
class Entry:
    name: str
    table: str  # "acom", "leib" or "zero"
    varieties: frozenset
    products: str
    param: str | None = None
    der: int | None = None
    der_special: tuple = ()  # ((value, der), ...)
    s_tuple: tuple | None = None  # text entries, may mention the parameter
    specials: tuple = ()  # parameter values materialized as graph nodes
    label: str = ""
    self_inverse: bool = False  # parameter defined up to alpha <-> 1/alpha

    @property
    def is_family(self):
        return self.param is not None

    @property
    def anticommutative(self):
        return self.table == "acom"


_ALL = frozenset(Variety)
_LIE = frozenset({Variety.LIE3, Variety.ACOM3, Variety.LEIB3})
_ACOM = frozenset({Variety.ACOM3})
_LEIB = frozenset({Variety.LEIB3})

ENTRIES = (
    Entry("g1", "acom", _LIE, "e2*e3 = e1", der=6, label="𝔤₁"),
    Entry("g2", "acom", _LIE, "e1*e3 = e1\ne2*e3 = e2", der=6, label="𝔤₂"),
    Entry("g3", "acom", _LIE, "e1*e3 = e1 + e2\ne2*e3 = alpha*e2", "alpha", der=4,
          specials=("-1", "0", "1"), label="𝔤₃", self_inverse=True),
    Entry("g4", "acom", _LIE, "e1*e2 = e3\ne1*e3 = -e2\ne2*e3 = e1", der=3, label="𝔤₄"),
    Entry("A1", "acom", _ACOM, "e1*e2 = e3\ne1*e3 = e1 + e3\ne2*e3 = alpha*e2", "alpha", der=1,
          label="𝒜₁", self_inverse=True),
    Entry("A2", "acom", _ACOM, "e1*e2 = e1\ne2*e3 = e2", der=2, label="𝒜₂"),
    Entry("A3", "acom", _ACOM, "e1*e2 = e3\ne1*e3 = e1\ne2*e3 = e2", der=3, label="𝒜₃"),
    Entry("L1", "leib", _LEIB, "e2*e2 = beta*e1\ne3*e2 = e1\ne3*e3 = e1", "beta", der=4,
          specials=("0", "1/4"), label="𝔏₁"),
    Entry("L2", "leib", _LEIB, "e3*e3 = e1", der=5, label="𝔏₂"),
    Entry("L3", "leib", _LEIB, "e2*e2 = e1\ne3*e3 = e1", der=4, label="𝔏₃"),
    Entry("L4", "leib", _LEIB, "e1*e3 = alpha*e1\ne2*e3 = e2\ne3*e2 = -e2\ne3*e3 = e1", "alpha", der=3,
          s_tuple=("alpha", "0", "1", "-1"), specials=("0", "1", "2"), label="𝔏₄"),
    Entry("L5", "leib", _LEIB, "e1*e3 = 2*e1\ne2*e2 = e1\ne2*e3 = e2\ne3*e2 = -e2\ne3*e3 = e1", der=2,
          s_tuple=("2", "0", "1", "-1"), label="𝔏₅"),
    Entry("L6", "leib", _LEIB, "e1*e3 = alpha*e1\ne2*e3 = e2", "alpha", der=2,
          der_special=(("0", 3), ("1", 4)), s_tuple=("alpha", "0", "1", "0"), specials=("0", "1"),
          label="𝔏₆", self_inverse=True),
    Entry("L7", "leib", _LEIB, "e1*e3 = e1 + e2\ne2*e3 = e2", der=2, s_tuple=("1", "0", "1", "0"), label="𝔏₇"),
    Entry("L8", "leib", _LEIB, "e1*e3 = e2\ne3*e3 = e1", der=3, label="𝔏₈"),
    Entry("L9", "leib", _LEIB, "e1*e3 = e2\ne2*e3 = e2\ne3*e3 = e1", der=2, s_tuple=("0", "0", "1", "0"),
          label="𝔏₉"),
    Entry("C3", "zero", _ALL, "", der=9, label="ℂ³"),
)

BY_NAME = {e.name: e for e in ENTRIES}


def entry(name) -> Entry:
    try:
        return BY_NAME[name]
    except KeyError:
        raise UnknownName(f"no catalog algebra named {name!r}") from None


def entries_for(variety) -> list:
    variety = Variety(variety)
    return [e for e in ENTRIES if variety in e.varieties]


def canonical_parameter(name, alpha):
    """Representative of ``{alpha, 1/alpha}`` for the self-inverse families;
    the lexicographically smaller ``(re, im)`` wins, 0 maps to 0."""
    alpha = as_scalar(alpha)
    if not entry(name).self_inverse or not alpha:
        return alpha
    inv = ONE / alpha
    return min(alpha, inv, key=lambda g: (g.re, g.im))


@dataclass(frozen=True)
class CatalogRef:
    name: str
    param: GaussianRational | None = None

    def __post_init__(self):
        e = entry(self.name)
        if self.param is not None:
            if not e.is_family:
                raise CatalogError(f"{self.name} takes no parameter")
            p = as_scalar(self.param)
            if not isinstance(p, GaussianRational):
                raise CatalogError("catalog parameters must be Gaussian rationals")
            object.__setattr__(self, "param", canonical_parameter(self.name, p))

    @property
    def entry(self):
        return entry(self.name)

    @property
    def is_generic(self):
        return self.entry.is_family and self.param is None

    def __str__(self):
        if self.param is None:
            return self.name
        return f"{self.name}[{self.entry.param}={self.param}]"

    def label(self):
        e = self.entry
        if e.is_family:
            sup = e.param if self.param is None else str(self.param)
            return f"{e.label}^{sup}"
        return e.label


def parse_ref(text) -> CatalogRef:
    """``L4``, ``L4[alpha=2]``, ``L4[2]`` or ``g3[alpha=1/2]``."""
    text = text.strip()
    if "[" not in text:
        return CatalogRef(text)
    name, rest = text.split("[", 1)
    rest = rest.rstrip("]")
    if "=" in rest:
        _, rest = rest.split("=", 1)
    return CatalogRef(name.strip(), scalar(rest.strip()))


@lru_cache(maxsize=None)
def _symbolic(name) -> Algebra:
    e = entry(name)
    if e.table == "zero":
        return Algebra.zero(3, name)
    params = (e.param,) if e.param else ()
    head = f"dim = 3\nparams = [{', '.join(params)}]\n"
    if e.anticommutative:
        head += "mode = anticommutative\n"
    return parse_algebra(head + e.products, name=name)


def get(ref, param=None, symbolic=True) -> Algebra:
    """Structure constants of a catalog algebra.  Families stay symbolic in
    their parameter unless a value is supplied; pass ``symbolic=False`` to
    insist on a concrete algebra."""
    if isinstance(ref, str):
        ref = parse_ref(ref) if param is None else CatalogRef(ref, as_scalar(param))
    elif param is not None:
        ref = CatalogRef(ref.name, as_scalar(param))
    A = _symbolic(ref.name)
    e = ref.entry
    if e.is_family:
        if ref.param is None:
            if not symbolic:
                raise ParameterRequired(f"{ref.name} needs a value for {e.param}")
            return A.with_name(str(ref))
        return A.specialize({e.param: ref.param}).with_name(str(ref))
    return A


def table_der(ref) -> int:
    e = ref.entry if isinstance(ref, CatalogRef) else entry(ref)
    if isinstance(ref, CatalogRef) and ref.param is not None:
        for v, d in e.der_special:
            if scalar(v) == ref.param:
                return d
    return e.der


def special_refs(name):
    e = entry(name)
    return [CatalogRef(name, scalar(v)) for v in e.specials]


def all_refs(variety=None, with_specials=True):
    out = []
    for e in ENTRIES if variety is None else entries_for(variety):
        out.append(CatalogRef(e.name))
        if with_specials:
            out.extend(special_refs(e.name))
    return out


# --------------------------------------------------------------------------
# anticommutative algebras as bilinear forms

_COMPLEMENT = {0: (1, 2), 1: (0, 2), 2: (0, 1)}


def acom_matrix(A: Algebra, assert_anticommutative=True):
    """3x3 matrix whose (i, j) entry is ``(-1)^i c_{u,v}^j`` with ``(u, v)``
    the pair complementary to ``i`` (0-based)."""
    if A.dim != 3:
        raise NotAnticommutative("the bilinear-form correspondence needs dimension 3")
    if assert_anticommutative and not is_anticommutative(A):
        raise NotAnticommutative(f"{A.name or 'algebra'} is not anticommutative")
    M = []
    for i in range(3):
        u, v = _COMPLEMENT[i]
        row = [A.c[u][v][j] for j in range(3)]
        M.append([x if i % 2 == 0 else -x for x in row])
    return M


def from_acom_matrix(M, params=(), name=None) -> Algebra:
    c = [[[ZERO] * 3 for _ in range(3)] for _ in range(3)]
    for i in range(3):
        u, v = _COMPLEMENT[i]
        sign = ONE if i % 2 == 0 else -ONE
        for j in range(3):
            val = as_scalar(M[i][j]) * sign
            c[u][v][j] = val
            c[v][u][j] = -val
    return Algebra(3, c, params, name)


def lift_to_dim4(A: Algebra) -> Algebra:
    """Four-dimensional algebra with products in ``C e4``, ``e4`` annihilating
    everything, and ``e_i e_j = B[i][j] e4`` for ``B`` the bilinear form."""
    B = acom_matrix(A)
    c = [[[ZERO] * 4 for _ in range(4)] for _ in range(4)]
    for i in range(3):
        for j in range(3):
            c[i][j][3] = B[i][j]
    return Algebra(4, c, A.params, f"lift({A.name})" if A.name else None)


def _isometry_dim(M):
    """Dimension of ``{d : d^T M + M d = 0}``."""
    n = len(M)
    rows = []
    for i in range(n):
        for j in range(n):
            row = [ZERO] * (n * n)
            for k in range(n):
                # (d^T M)_{ij} = sum_k d_{ki} M_{kj};  (M d)_{ij} = sum_k M_{ik} d_{kj}
                row[k * n + i] = row[k * n + i] + M[k][j]
            for k in range(n):
                row[k * n + j] = row[k * n + j] + M[i][k]
            rows.append(row)
    return len(linalg.nullspace(rows, n * n))


def pencil_invariant(M):
    """``(det(M + k M^T))_{k=0..3}``; congruence scales it by ``det(X)^2``, so
    its projective class is an invariant (``None`` when it vanishes)."""
    Mt = linalg.transpose(M)
    vals = [linalg.det([[M[i][j] + k * Mt[i][j] for j in range(3)] for i in range(3)]) for k in range(4)]
    return vals if any(vals) else None


def _parallel(a, b):
    if a is None or b is None:
        return a is None and b is None
    return all(not (a[i] * b[j] - a[j] * b[i]) for i in range(4) for j in range(i + 1, 4))


def _pencil_candidates(Ma, Mb, param):
    """Values of ``param`` for which the pencil invariants of the concrete
    ``Ma`` and the family ``Mb`` agree, or ``None`` if they do not pin the
    parameter down."""
    import sympy as sp

    from .degeneration import _poly_of

    a = pencil_invariant(Ma)
    b = pencil_invariant(Mb)
    if a is None:
        if b is None:
            return None
        polys = [x for x in b]
    elif b is None:
        return []
    else:
        polys = [a[i] * b[j] - a[j] * b[i] for i in range(4) for j in range(i + 1, 4)]
    g = None
    for x in polys:
        x = as_scalar(x)
        if not x:
            continue
        if isinstance(x, GaussianRational):
            return []
        p = _poly_of(x, (param,), "num")
        g = p if g is None else g.gcd(p)
    if g is None:
        return None
    roots = []
    for f, _ in g.factor_list()[1]:
        if f.degree() == 1:
            c1, c0 = f.all_coeffs()
            r = sp.nsimplify(-sp.sympify(c0) / sp.sympify(c1))
            from fractions import Fraction

            roots.append(GaussianRational(Fraction(str(sp.re(r))), Fraction(str(sp.im(r)))))
    return roots


def _xvars(n, prefix="x"):
    return tuple(f"{prefix}{i + 1}{j + 1}" for i in range(n) for j in range(n))


def congruence_equations(Mmu, Mlam, extra_params=()):
    """``X^T Mmu X = Mlam`` with ``d * det X = 1``."""
    n = len(Mmu)
    xs = _xvars(n)
    vars = xs + tuple(extra_params) + ("d",)
    X = [[MPoly.var(vars, xs[i * n + j]) for j in range(n)] for i in range(n)]
    Mu = [[MPoly.from_scalar(vars, Mmu[i][j]) for j in range(n)] for i in range(n)]
    La = [[MPoly.from_scalar(vars, Mlam[i][j]) for j in range(n)] for i in range(n)]
    eqs = []
    for i in range(n):
        for j in range(n):
            s = MPoly(vars)
            for k in range(n):
                for l in range(n):
                    if Mu[k][l]:
                        s = s + X[k][i] * Mu[k][l] * X[l][j]
            eqs.append(s - La[i][j])
    from .solve import determinant_poly

    eqs.append(MPoly.var(vars, "d") * determinant_poly(X) - 1)
    return eqs, vars


def _concrete(M):
    return all(isinstance(as_scalar(x), GaussianRational) for row in M for x in row)


def congruent(Mmu, Mlam, budget=None, seed=0) -> bool:
    """Whether ``Mlam = X^T Mmu X`` for some nonsingular complex ``X``."""
    if not (_concrete(Mmu) and _concrete(Mlam)):
        raise ValueError("congruent() needs parameter-free matrices")
    if linalg.rank(Mmu) != linalg.rank(Mlam):
        return False
    sym = lambda M: [[M[i][j] + M[j][i] for j in range(3)] for i in range(3)]  # noqa: E731
    if linalg.rank(sym(Mmu)) != linalg.rank(sym(Mlam)):
        return False
    eqs, vars = congruence_equations(Mmu, Mlam)
    k = _isometry_dim(Mlam)
    res = has_solution(eqs, vars, slice_dim=k, keep=("d",), budget=budget or Budget(max_seconds=60), seed=seed)
    return res.nonempty


# --------------------------------------------------------------------------
# isomorphism of general algebras


def isomorphism_equations(A: Algebra, B: Algebra, extra_params=()):
    """Polynomial system in the entries of ``G`` (rows = new basis of ``A``)
    whose solutions with ``det G != 0`` are the bases in which ``A`` has the
    constants of ``B``."""
    n = A.dim
    gs = _xvars(n, "g")
    vars = gs + tuple(extra_params) + ("d",)
    G = [[MPoly.var(vars, gs[i * n + j]) for j in range(n)] for i in range(n)]
    cA = A.c
    cB = [[[MPoly.from_scalar(vars, B.c[i][j][k]) for k in range(n)] for j in range(n)] for i in range(n)]
    eqs = []
    for i in range(n):
        for j in range(n):
            # e-coordinates of E_i E_j
            lhs = [MPoly(vars) for _ in range(n)]
            for a in range(n):
                for b in range(n):
                    row = cA[a][b]
                    if not any(row):
                        continue
                    f = G[i][a] * G[j][b]
                    for m in range(n):
                        if row[m]:
                            lhs[m] = lhs[m] + f * row[m]
            for m in range(n):
                rhs = MPoly(vars)
                for k in range(n):
                    if cB[i][j][k]:
                        rhs = rhs + cB[i][j][k] * G[k][m]
                eq = lhs[m] - rhs
                if eq:
                    eqs.append(eq)
    from .solve import determinant_poly

    eqs.append(MPoly.var(vars, "d") * determinant_poly(G) - 1)
    return eqs, vars


def isomorphic(A: Algebra, B: Algebra, budget=None, seed=0) -> bool:
    if A.params or B.params:
        raise ValueError("isomorphic() needs parameter-free algebras")
    if A.dim != B.dim:
        return False
    if fingerprint(A) != fingerprint(B):
        return False
    eqs, vars = isomorphism_equations(A, B)
    k = derivation_dim(A)
    return has_solution(eqs, vars, slice_dim=k, keep=("d",), budget=budget or Budget(max_seconds=60), seed=seed).nonempty


# --------------------------------------------------------------------------
# identification


def fingerprint(A: Algebra) -> tuple:
    """Isomorphism invariants: Der, Ann_L, A^(+2), A^2 dimensions, the power
    and derived series dimensions, anticommutativity."""
    return (
        derivation_dim(A),
        left_annihilator(A).dim,
        plus_square(A).dim,
        square(A).dim,
        power_dims(A, 5),
        derived_dims(A),
        is_anticommutative(A),
    )


def _compatible_family(fp, generic):
    # semicontinuity: special members can only have larger Der/Ann and
    # smaller image spaces than the generic member
    return (
        fp[0] >= generic[0]
        and fp[1] >= generic[1]
        and fp[2] <= generic[2]
        and fp[3] <= generic[3]
        and all(a <= b for a, b in zip(fp[4], generic[4]))
        and all(a <= b for a, b in zip(fp[5], generic[5]))
        and fp[6] == generic[6]
    )


@lru_cache(maxsize=None)
def _entry_fingerprint(name):
    return fingerprint(_symbolic(name))


def candidates(A: Algebra, variety):
    fp = fingerprint(A)
    out = []
    for e in entries_for(variety):
        gen = _entry_fingerprint(e.name)
        if e.is_family:
            if _compatible_family(fp, gen):
                out.append(e)
        elif gen == fp:
            out.append(e)
    return fp, out


def _confirm(A: Algebra, e: Entry, variety, budget, seed):
    """Return the list of CatalogRefs of entry ``e`` isomorphic to ``A``."""
    B = _symbolic(e.name)
    use_forms = Variety(variety) is Variety.ACOM3 or (e.anticommutative and is_anticommutative(A))
    if use_forms:
        Ma = acom_matrix(A)
        Mb = acom_matrix(B)
        if not e.is_family:
            if not _parallel(pencil_invariant(Ma), pencil_invariant(Mb)):
                return []
            return [CatalogRef(e.name)] if congruent(Ma, Mb, budget, seed) else []
        cands = _pencil_candidates(Ma, Mb, e.param)
        if cands is not None:
            found = []
            for r in cands:
                ref = CatalogRef(e.name, r)
                Br = get(ref)
                if fingerprint(Br) == fingerprint(A) and congruent(Ma, acom_matrix(Br), budget, seed):
                    if ref not in found:
                        found.append(ref)
            return found
        eqs, vars = congruence_equations(Ma, Mb, (e.param,))
        k = _isometry_dim(Ma)
    else:
        if not e.is_family:
            return [CatalogRef(e.name)] if _iso_concrete(A, B, budget, seed) else []
        eqs, vars = isomorphism_equations(A, B, (e.param,))
        k = derivation_dim(A)
    res = parameter_values(eqs, vars, e.param, slice_dim=k, budget=budget, seed=seed)
    if res is None:
        return []
    roots, others = res
    if others:
        raise Unknown(f"parameter of {e.name} is not in Q(i): roots of {others}")
    found = []
    for r in roots:
        ref = CatalogRef(e.name, r)
        if ref not in found:
            found.append(ref)
    return found


def _iso_concrete(A, B, budget, seed):
    if fingerprint(A) != fingerprint(B):
        return False
    eqs, vars = isomorphism_equations(A, B)
    return has_solution(eqs, vars, slice_dim=derivation_dim(A), keep=("d",), budget=budget, seed=seed).nonempty


def identify(A: Algebra, variety, budget=None, seed=0) -> CatalogRef:
    """Catalog entry isomorphic to ``A`` (parameter in canonical form).

    Candidates are filtered by :func:`fingerprint` and each one is confirmed
    by solving for an explicit change of basis; raises :class:`Unknown` if
    nothing matches and ``RuntimeError`` if two distinct entries match."""
    variety = Variety(variety)
    if A.params:
        raise ValueError("identify() needs a parameter-free algebra")
    if A.dim != 3:
        raise Unknown("only three-dimensional algebras are catalogued")
    if variety is Variety.ACOM3 and not is_anticommutative(A):
        raise Unknown("not anticommutative")
    if variety is Variety.LEIB3 and not is_leibniz(A):
        raise Unknown("not a Leibniz algebra")
    budget = budget or Budget(max_seconds=60)
    fp, cands = candidates(A, variety)
    matches = []
    for e in cands:
        try:
            matches.extend(_confirm(A, e, variety, budget, seed))
        except Inconclusive:
            continue
    if not matches:
        raise Unknown(f"no catalog algebra matches fingerprint {fp}")
    names = {m.name for m in matches}
    if len(names) > 1 or len(set(matches)) > 1:
        raise RuntimeError(f"ambiguous identification: {sorted(map(str, set(matches)))}")
    return matches[0]


def dump_catalog(variety=None) -> str:
    """All tables in the algebra text format, in catalog order."""
    blocks = []
    for e in ENTRIES if variety is None else entries_for(variety):
        A = _symbolic(e.name)
        text = format_algebra(A.with_name(e.name), anticommutative=e.anticommutative)
        meta = [f"# {e.table}, Der = {e.der}"]
        if e.der_special:
            meta.append("# Der special values: " + ", ".join(f"{e.param}={v}: {d}" for v, d in e.der_special))
        if e.s_tuple:
            meta.append("# S = (" + ", ".join(e.s_tuple) + ")")
        blocks.append("\n".join(meta) + "\n" + text)
    return "\n".join(blocks)


def s_tuple_of_entry(ref) -> tuple | None:
    e = ref.entry if isinstance(ref, CatalogRef) else entry(ref)
    if not e.s_tuple:
        return None
    params = (e.param,) if e.param else ()
    vals = tuple(scalar(x, params) for x in e.s_tuple)
    if isinstance(ref, CatalogRef) and ref.param is not None:
        vals = tuple(specialize(v, {e.param: ref.param}) for v in vals)
    return vals


__all__ = [
    "CatalogRef",
    "Variety",
    "ENTRIES",
    "entry",
    "get",
    "canonical_parameter",
    "acom_matrix",
    "congruent",
    "lift_to_dim4",
    "identify",
    "dump_catalog",
    "params_of",
]
