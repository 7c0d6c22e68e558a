"""Non-degeneration arguments: invariant inequalities, Borel-stable closed
sets (``R``-sets) and the S-tuple invariant of standard structures."""

from __future__ import annotations

import enum
import itertools
import random
import re
from dataclasses import dataclass, field

from . import catalog, linalg
from .algebra import (
    Algebra,
    SingularBasis,
    change_basis,
    derivation_dim,
    is_nilpotent,
    is_solvable,
    left_annihilator,
    parse_param_list,
    plus_square,
)
from .catalog import CatalogRef
from .groebner import DEGREVLEX, Budget, BudgetExceeded, MPoly, buchberger, contains_one, reduce
from .scalar import ONE, ZERO, GaussianRational, ParamRational, as_scalar, params_of, scalar, specialize
from .solve import determinant_poly, eliminate_to, gaussian_roots


class ObstructionError(ValueError):
    pass


class NotStandard(ObstructionError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("not a standard structure: " + "; ".join(self.violations))


class FormsNotVanishingOnSource(ObstructionError):
    pass


class RSetFormatError(ObstructionError):
    pass


class Kind(enum.Enum):
    DER = "der"
    ANN = "ann_l"
    PLUS_SQUARE = "plus_square"
    RSET = "rset"
    STUPLE = "s_tuple"
    PROPAGATED = "propagated"


@dataclass(frozen=True)
class ObstructionEvidence:
    kind: Kind
    source: object
    target: object
    payload: tuple = ()
    note: str = field(default="", compare=False)

    def __str__(self):
        body = ", ".join(str(p) for p in self.payload)
        return f"{self.kind.value}({body})" if body else self.kind.value


# --------------------------------------------------------------------------
# invariant inequalities


def _algebra(x) -> Algebra:
    if isinstance(x, Algebra):
        return x
    ref = x if isinstance(x, CatalogRef) else catalog.parse_ref(str(x))
    return catalog.get(ref)


def _is_generic_family(x):
    return isinstance(x, CatalogRef) and x.is_generic


def _der(x):
    return derivation_dim(_algebra(x))


def _same(a, b):
    return isinstance(a, CatalogRef) and isinstance(b, CatalogRef) and a == b


def der_obstruction(A, B) -> bool:
    """A degeneration raises the derivation dimension strictly.  For a family
    source ``A(*)`` the orbit-closure dimension ``9 - Der + 1`` must exceed
    that of ``B``, and members of the family are never blocked."""
    if _same(A, B):
        return False
    if isinstance(A, CatalogRef) and isinstance(B, CatalogRef) and A.is_generic and B.name == A.name:
        return False
    da, db = _der(A), _der(B)
    if _is_generic_family(A):
        return da - 1 >= db
    return da >= db


def ann_obstruction(A, B) -> bool:
    """``dim Ann_L(A) > dim Ann_L(B)`` blocks ``A -> B`` (generic values for
    families; special members only have larger annihilators)."""
    if _same(A, B):
        return False
    return left_annihilator(_algebra(A)).dim > left_annihilator(_algebra(B)).dim


def plus_square_obstruction(A, B) -> bool:
    """``dim A^(+2) < dim B^(+2)`` blocks ``A -> B``."""
    if _same(A, B):
        return False
    return plus_square(_algebra(A)).dim < plus_square(_algebra(B)).dim


# --------------------------------------------------------------------------
# S-tuples


def standard_violations(A: Algebra) -> list:
    """Conditions of a standard structure that fail for ``A`` (empty list
    when standard): dimension 3, solvable and non-nilpotent, ``<e1, e2>`` a
    nilpotent ideal, and the vanishing of the designated constants."""
    out = []
    if A.dim != 3:
        return ["dimension is not 3"]
    c = A.c
    for i, j, k in itertools.product(range(2), range(2), range(3)):
        if k + 1 >= min(i, j) + 1 and c[i][j][k]:
            out.append(f"c_{i + 1}{j + 1}^{k + 1} != 0")
    for i, j in ((2, 1), (1, 2)):
        if c[i][j][0]:
            out.append(f"c_{i + 1}{j + 1}^1 != 0")
    for i in range(2):
        for j in (2,):
            if c[i][j][2] or c[j][i][2]:
                out.append(f"<e1, e2> is not an ideal (e{i + 1}e{j + 1} or e{j + 1}e{i + 1} has an e3 component)")
    if not A.params:
        if not is_solvable(A):
            out.append("not solvable")
        if is_nilpotent(A):
            out.append("nilpotent")
    else:
        # the diagonal entries of the S-tuple generate the non-nilpotent part
        if not any(c[i][2][i] or c[2][i][i] for i in range(2)):
            out.append("nilpotent")
    return out


def s_tuple(A, basis=None) -> tuple:
    """``(c_13^1, c_31^1, c_23^2, c_32^2)`` after checking that ``A`` (written
    in ``basis`` if given) is a standard structure."""
    A = _algebra(A)
    if basis is not None:
        A = change_basis(A, basis)
        A = Algebra(A.dim, A.c, A.params, A.name)
    bad = standard_violations(A)
    if bad:
        raise NotStandard(bad)
    c = A.c
    return (c[0][2][0], c[2][0][0], c[1][2][1], c[2][1][1])


def _permuted(tup, sigma):
    a1, b1, a2, b2 = tup
    return (a1, b1, a2, b2) if sigma == 0 else (a2, b2, a1, b1)


def _dot(form, tup):
    acc = ZERO
    for f, x in zip(form, tup):
        if f and x:
            acc = acc + f * x
    return acc


def vanishing_forms(sources, identically=True):
    """Linear forms vanishing on every source tuple.  ``identically`` asks
    for constant-coefficient forms vanishing for all parameter values (a
    family argument); otherwise coefficients may depend on the parameter."""
    rows = []
    for tup in sources:
        tup = [as_scalar(x) for x in tup]
        names = sorted(set().union(*(params_of(x) for x in tup)))
        if identically and names:
            # split every entry into its monomial coefficients
            coeff = {}
            for m, x in enumerate(tup):
                if isinstance(x, ParamRational):
                    if not x.is_polynomial():
                        raise ObstructionError("S-tuple entries must be polynomial in the parameter")
                    for mono, cf in x.numerator_terms().items():
                        key = tuple(zip(x.vars, mono))
                        coeff.setdefault(key, [ZERO] * 4)[m] = cf
                elif x:
                    coeff.setdefault((), [ZERO] * 4)[m] = x
            rows.extend(coeff.values())
        else:
            rows.append(tup)
    return [_clear_denominators(v) for v in linalg.nullspace(rows, 4)]


def _clear_denominators(form):
    """Scale a form so its coefficients are polynomial in the parameters."""
    form = [as_scalar(x) for x in form]
    while True:
        dens = [x for x in form if isinstance(x, ParamRational) and not x.is_polynomial()]
        if not dens:
            return tuple(form)
        d = _denominator(dens[0])
        form = [as_scalar(x * d) for x in form]


def _denominator(x: ParamRational):
    return ParamRational.make(x.vars, x.den, x.den.ring.one)


@dataclass(frozen=True)
class STupleResult:
    obstructed: bool
    forms: tuple
    exceptions: tuple = ()  # parameter values where the argument fails

    def __bool__(self):
        return self.obstructed


def s_tuple_obstruction(sources, target, forms=None, identically=True) -> STupleResult:
    """``A(*) -/-> B`` from linear forms vanishing on the S-tuples of the
    sources but, for both pair orders, not on the S-tuple of the target.
    Scaling by ``c != 0`` is irrelevant because the forms are homogeneous."""
    sources = [tuple(as_scalar(x) for x in s) for s in sources]
    target = tuple(as_scalar(x) for x in target)
    if forms is None:
        forms = vanishing_forms(sources, identically)
    forms = [tuple(as_scalar(x) for x in f) for f in forms]
    for f in forms:
        for s in sources:
            if _dot(f, s):
                raise FormsNotVanishingOnSource(f"form {f} does not vanish on {s}")
    blocked = []
    bad_values = set()
    for sigma in (0, 1):
        vals = [_dot(f, _permuted(target, sigma)) for f in forms]
        nonzero = [v for v in vals if v]
        blocked.append(bool(nonzero))
        params = set().union(*(params_of(v) for v in nonzero)) if nonzero else set()
        if nonzero and len(params) == 1:
            # values of the parameter where every form vanishes again
            (name,) = params
            common = None
            for v in nonzero:
                if isinstance(v, GaussianRational):
                    common = set()
                    break
                rts = _roots_of(v, name)
                common = rts if common is None else common & rts
            bad_values |= common or set()
    exc = tuple(sorted(bad_values, key=lambda g: (g.re, g.im)))
    return STupleResult(all(blocked), tuple(forms), exc)


def _roots_of(x, name):
    num = {m: c for m, c in x.numerator_terms().items()}
    p = MPoly((name,), num)
    roots, _ = gaussian_roots(p, name)
    return set(roots)


# --------------------------------------------------------------------------
# R-sets


_CSYM = re.compile(r"c\[(\d)\]\[(\d)\]\[(\d)\]")
_FLAG = re.compile(r"^\s*(A\d\s*\*\s*A\d(?:\s*\+\s*A\d\s*\*\s*A\d)*)\s*(=\s*0|<=\s*A(\d))\s*$")


def _cname(i, j, k):
    return f"c_{i}_{j}_{k}"


C_NAMES = tuple(_cname(i, j, k) for i in range(1, 4) for j in range(1, 4) for k in range(1, 4))


@dataclass(frozen=True)
class RSetSpec:
    """Closed set of structures described in a basis ``f1, f2, f3``:
    polynomial equations in the constants ``c[i][j][k]`` (1-based) and flag
    constraints on ``A_m = span(f_m, ..., f_3)``.  ``flags`` holds
    ``(i, j, k)`` meaning ``A_i A_j`` lies in ``A_k`` (``k = 4`` for zero)."""

    name: str
    equations: tuple  # scalars in C_NAMES and params, each = 0
    flags: tuple
    params: tuple = ()
    text: str = field(default="", compare=False)

    def vanishing_constants(self):
        """Constants forced to vanish by the flags: ``c_ab^m = 0`` for
        ``a >= i, b >= j, m < k``."""
        out = set()
        for i, j, k in self.flags:
            for a in range(i, 4):
                for b in range(j, 4):
                    for m in range(1, k):
                        out.add((a, b, m))
        return sorted(out)

    def specialize(self, bindings):
        eqs = tuple(specialize(e, bindings) for e in self.equations)
        params = tuple(p for p in self.params if p not in bindings)
        return RSetSpec(self.name, eqs, self.flags, params, self.text)

    def __str__(self):
        return self.text or self.name


def parse_rset(text, name="R", params=()) -> RSetSpec:
    """Equation lines like ``c[2][1][2] = -c[1][2][2]`` (chains ``a = b = c``
    allowed) and flag lines ``A1*A3 + A2*A2 = 0``, ``A3*A1 <= A3``; an
    optional ``params = [alpha]`` header."""
    eqs, flags = [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("params"):
            params = parse_param_list(line.split("=", 1)[1])
            continue
        if line.startswith("name"):
            name = line.split("=", 1)[1].strip()
            continue
        m = _FLAG.match(line)
        if m:
            k = 4 if m.group(2).startswith("=") else int(m.group(3))
            for prod in m.group(1).split("+"):
                i, j = (int(s.strip()[1:]) for s in prod.split("*"))
                if not (1 <= i <= 3 and 1 <= j <= 3 and 1 <= k <= 4):
                    raise RSetFormatError(f"line {lineno}: flag index out of range")
                flags.append((i, j, k))
            continue
        parts = [_CSYM.sub(lambda mm: _cname(*mm.groups()), p) for p in line.split("=")]
        if len(parts) < 2:
            raise RSetFormatError(f"line {lineno}: expected an equation or a flag, got {raw!r}")
        try:
            vals = [scalar(p.strip(), tuple(params) + C_NAMES) for p in parts]
        except Exception as exc:
            raise RSetFormatError(f"line {lineno}: {exc}") from exc
        for a, b in zip(vals, vals[1:]):
            if a - b:
                eqs.append(a - b)
    return RSetSpec(name, tuple(eqs), tuple(flags), tuple(params), text.strip())


RSET_L4 = parse_rset(
    """
    name = R(L4)
    params = [alpha]
    c[1][1][2] = 0
    c[2][1][2] = -c[1][2][2]
    c[3][1][3] = -alpha*c[1][2][2]
    c[2][1][3] = (alpha-1)*c[1][2][3]
    A1*A3 + A2*A2 = 0
    A3*A1 <= A3
    A1*A1 <= A2
    """
)

RSET_L5 = parse_rset(
    """
    name = R(L5)
    c[3][1][3] = 2*c[2][1][2] = -2*c[1][2][2]
    c[2][1][3] = c[1][2][3]
    A1*A3 + A3*A2 = 0
    A3*A1 + A2*A2 <= A3
    A1*A2 + A2*A1 <= A2
    """
)

# trace of every left multiplication vanishes; a GL-invariant closed set
RSET_TRACELESS = parse_rset(
    """
    name = R(traceless)
    c[1][1][1] + c[1][2][2] + c[1][3][3] = 0
    c[2][1][1] + c[2][2][2] + c[2][3][3] = 0
    c[3][1][1] + c[3][2][2] + c[3][3][3] = 0
    """
)

TABLE_BASIS = ((0, 0, 1), (0, 1, 0), (1, 0, 0))  # f1 = e3, f2 = e2, f3 = e1


def _constants_in(A: Algebra, basis):
    if basis is None:
        return A
    P = change_basis(A, basis)
    return Algebra(A.dim, P.c, P.params, A.name)


def _eval_equation(eq, A: Algebra):
    vals = {_cname(i + 1, j + 1, k + 1): A.c[i][j][k] for i in range(3) for j in range(3) for k in range(3)}
    return specialize(eq, vals)


def r_membership(A, basis, R: RSetSpec) -> bool:
    """Whether the constants of ``A`` in ``basis`` satisfy ``R`` exactly
    (symbolically in the family parameter)."""
    A = _algebra(A)
    if basis is not None:
        if not linalg.det([[as_scalar(x) for x in r] for r in basis]):
            raise SingularBasis("basis is singular")
    F = _constants_in(A, basis)
    for eq in R.equations:
        if as_scalar(_eval_equation(eq, F)):
            return False
    for a, b, m in R.vanishing_constants():
        if F.c[a - 1][b - 1][m - 1]:
            return False
    return True


class Verdict(enum.Enum):
    PROVEN = "Proven"
    COUNTEREXAMPLE = "Counterexample"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class AvoidResult:
    verdict: Verdict
    witness: tuple | None = None  # basis matrix (rows f_i) when found
    exceptions: tuple = ()  # parameter values where emptiness fails
    detail: str = ""
    method: str = "bruhat"

    @property
    def proven(self):
        return self.verdict is Verdict.PROVEN


def _mat_mpoly(M, vars):
    return [[x if isinstance(x, MPoly) else MPoly.from_scalar(vars, x) for x in row] for row in M]


def _constants_poly(B: Algebra, F, Finv):
    """Constants of ``B`` in the basis with rows ``F`` (MPoly entries),
    using ``Finv`` (polynomial, possibly scaled by the determinant)."""
    n = 3
    vars = F[0][0].vars
    out = {}
    for a in range(n):
        for b in range(n):
            v = [MPoly(vars) for _ in range(n)]
            for p in range(n):
                if not F[a][p]:
                    continue
                for q in range(n):
                    if not F[b][q]:
                        continue
                    row = B.c[p][q]
                    if not any(row):
                        continue
                    f = F[a][p] * F[b][q]
                    for r in range(n):
                        if row[r]:
                            v[r] = v[r] + f * row[r]
            for m in range(n):
                s = MPoly(vars)
                for r in range(n):
                    if v[r] and Finv[r][m]:
                        s = s + v[r] * Finv[r][m]
                out[(a + 1, b + 1, m + 1)] = s
    return out


def _system(B, R, F, Finv, vars, scale=None, scale_degree=None):
    cons = _constants_poly(B, F, Finv)
    eqs = []
    for key in R.vanishing_constants():
        if cons[key]:
            eqs.append(cons[key])
    for eq in R.equations:
        eqs.append(_substitute_equation(eq, cons, vars, scale))
    return [e for e in eqs if e]


def _substitute_equation(eq, cons, vars, scale=None):
    """Plug polynomial constants into an R-equation (a scalar in the
    ``c_i_j_k`` symbols and parameters).  With ``scale`` (the determinant)
    each term of degree ``k`` in the constants is multiplied by
    ``scale^(D-k)`` where ``D`` is the top degree, clearing denominators."""
    eq = as_scalar(eq)
    if isinstance(eq, GaussianRational):
        return MPoly.const(vars, eq)
    if not eq.is_polynomial():
        raise RSetFormatError("R-set equations must be polynomial")
    terms = eq.numerator_terms()
    cidx = [k for k, v in enumerate(eq.vars) if v in C_NAMES]
    top = max(sum(m[k] for k in cidx) for m in terms)
    acc = MPoly(vars)
    for mono, cf in terms.items():
        t = MPoly.const(vars, cf)
        deg = 0
        for v, e in zip(eq.vars, mono):
            if not e:
                continue
            if v in C_NAMES:
                i, j, k = (int(x) for x in v.split("_")[1:])
                t = t * cons[(i, j, k)] ** e
                deg += e
            else:
                t = t * MPoly.var(vars, v) ** e
        if scale is not None and top > deg:
            t = t * scale ** (top - deg)
        acc = acc + t
    return acc


def _unipotent(vars, names):
    u1, u2, u3 = (MPoly.var(vars, n) for n in names)
    one, zero = MPoly.const(vars, 1), MPoly(vars)
    U = [[one, u1, u2], [zero, one, u3], [zero, zero, one]]
    # inverse of a unit upper-triangular matrix
    Uinv = [[one, -u1, u1 * u3 - u2], [zero, one, -u3], [zero, zero, one]]
    return U, Uinv


def _random_search(B, R, rng, tries):
    for _ in range(tries):
        F = [[scalar(str(rng.randint(-3, 3))) for _ in range(3)] for _ in range(3)]
        if not linalg.det(F):
            continue
        if r_membership(B, F, R):
            return tuple(tuple(r) for r in F)
    return None


def orbit_avoids_rset(B, R: RSetSpec, bindings=None, *, method="bruhat", budget=None, seed=0,
                      random_tries=200) -> AvoidResult:
    """Decide whether no basis of ``B`` puts its constants into ``R``.

    ``method="bruhat"`` assumes ``R`` is stable under upper-triangular base
    changes (see :func:`check_borel_stability`); then bases ``w u`` with
    ``w`` a permutation and ``u`` unit upper-triangular suffice, and the flag
    constraints become vanishing constants.  ``method="full"`` uses all nine
    entries of the basis matrix plus ``d det = 1``.  Free parameters of ``R``
    stay symbolic; values where emptiness fails are reported as exceptions."""
    B = _algebra(B)
    if B.params:
        raise ValueError("specialize the target before testing orbit avoidance")
    if bindings:
        R = R.specialize({k: as_scalar(v) for k, v in bindings.items()})
    budget = budget or Budget(max_seconds=300)
    rng = random.Random(seed)
    if not R.params:
        w = _random_search(B, R, rng, random_tries)
        if w is not None:
            return AvoidResult(Verdict.COUNTEREXAMPLE, w, detail="randomized search", method=method)
    systems = []
    if method == "bruhat":
        names = ("u1", "u2", "u3")
        vars = names + tuple(R.params)
        for perm, P in linalg.permutation_matrices(3):
            U, Uinv = _unipotent(vars, names)
            Pm = _mat_mpoly(P, vars)
            F = _matmul(Pm, U)
            Finv = _matmul(Uinv, _mat_mpoly(linalg.transpose(P), vars))
            systems.append((perm, _system(B, R, F, Finv, vars), vars, F))
    elif method == "full":
        names = tuple(f"g{i}{j}" for i in range(1, 4) for j in range(1, 4))
        vars = names + tuple(R.params) + ("d",)
        F = [[MPoly.var(vars, names[3 * i + j]) for j in range(3)] for i in range(3)]
        det = determinant_poly(F)
        adj = _adjugate(F)
        eqs = []
        cons = _constants_poly(B, F, adj)  # constants times det
        for key in R.vanishing_constants():
            if cons[key]:
                eqs.append(cons[key])
        for eq in R.equations:
            eqs.append(_substitute_equation(eq, cons, vars, det))
        eqs.append(MPoly.var(vars, "d") * det - 1)
        systems.append(("full", [e for e in eqs if e], vars, F))
    else:
        raise ValueError(f"unknown method {method!r}")
    exceptions = set()
    for label, eqs, vars, F in systems:
        if any(e.is_constant() for e in eqs):
            continue
        try:
            gb = buchberger(eqs, DEGREVLEX, budget)
        except BudgetExceeded as exc:
            return AvoidResult(Verdict.INCONCLUSIVE, detail=f"cell {label}: {exc}", method=method)
        if contains_one(gb):
            continue
        if not R.params:
            point = _point_of(gb, vars, F)
            return AvoidResult(Verdict.COUNTEREXAMPLE, point, detail=f"cell {label} has complex solutions",
                               method=method)
        (pname,) = R.params
        try:
            polys = eliminate_to(eqs, vars, pname, budget=budget)
        except BudgetExceeded as exc:
            return AvoidResult(Verdict.INCONCLUSIVE, detail=f"cell {label}: {exc}", method=method)
        polys = [p for p in polys if p]
        if not polys:
            return AvoidResult(Verdict.COUNTEREXAMPLE, None, detail=f"cell {label} meets R for generic {pname}",
                               method=method)
        roots, others = gaussian_roots(min(polys, key=lambda q: q.degree()), pname)
        exceptions |= set(roots)
        exceptions |= {f"{o}=0" for o in others}
    exc = tuple(sorted(exceptions, key=str))
    return AvoidResult(Verdict.PROVEN, exceptions=exc, method=method)


def _matmul(A, B):
    n = len(A)
    vars = A[0][0].vars
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            s = MPoly(vars)
            for k in range(n):
                if A[i][k] and B[k][j]:
                    s = s + A[i][k] * B[k][j]
            row.append(s)
        out.append(row)
    return out


def _adjugate(F):
    n = 3
    adj = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [[F[r][c] for c in range(n) if c != j] for r in range(n) if r != i]
            d = determinant_poly(minor)
            adj[j][i] = d if (i + j) % 2 == 0 else -d
    return adj


def _point_of(gb, vars, F):
    """Try small rational values for the free variables to exhibit an
    explicit basis; ``None`` if nothing simple turns up."""
    for vals in itertools.product((0, 1, -1, 2), repeat=len(vars)):
        point = dict(zip(vars, vals))
        if all(not p.evaluate(point) for p in gb.polys):
            rows = tuple(tuple(as_scalar(x.evaluate(point)) for x in row) for row in F)
            if linalg.det([list(r) for r in rows]):
                return rows
    return None


# --------------------------------------------------------------------------
# Borel stability


class Stability(enum.Enum):
    STABLE = "Stable"
    UNSTABLE = "Unstable"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class StabilityResult:
    verdict: Stability
    witness: tuple | None = None  # (point constants, triangular matrix)
    detail: str = ""


def check_borel_stability(R: RSetSpec, budget=None, seed=0) -> StabilityResult:
    """Ideal-membership test that the equations of ``R``, pulled back along
    a symbolic upper-triangular base change, lie in the ideal of ``R``.

    The constants of the image are those of the point in the basis
    ``f'_i = sum_{j >= i} b_ij f_j``; denominators (powers of ``det b``) are
    cleared before reducing modulo a Groebner basis of the R-ideal."""
    budget = budget or Budget(max_seconds=300)
    bnames = ("b11", "b12", "b13", "b22", "b23", "b33")
    vars = bnames + C_NAMES + tuple(R.params)
    one, zero = MPoly.const(vars, 1), MPoly(vars)
    b = {n: MPoly.var(vars, n) for n in bnames}
    Bm = [[b["b11"], b["b12"], b["b13"]], [zero, b["b22"], b["b23"]], [zero, zero, b["b33"]]]
    det = b["b11"] * b["b22"] * b["b33"]
    adj = _adjugate(Bm)
    gens = []
    for key in R.vanishing_constants():
        gens.append(MPoly.var(vars, _cname(*key)))
    gens.extend(_substitute_equation(eq, {k: MPoly.var(vars, _cname(*k)) for k in _all_keys()}, vars)
                for eq in R.equations)
    gens = [g for g in gens if g]
    if any(g.is_constant() for g in gens):
        return StabilityResult(Stability.STABLE, detail="R is empty")
    try:
        gb = buchberger(gens, DEGREVLEX, budget) if gens else None
    except BudgetExceeded as exc:
        return StabilityResult(Stability.INCONCLUSIVE, detail=str(exc))
    # image constants times det, with the generic point's constants as variables
    cons = _symbolic_constants(vars, Bm, adj)
    image = []
    for key in R.vanishing_constants():
        image.append(cons[key])
    for eq in R.equations:
        image.append(_substitute_equation(eq, cons, vars, det))
    failing = [p for p in image if p and (gb is None or reduce(p, gb))]
    if not failing:
        return StabilityResult(Stability.STABLE)
    w = _stability_witness(R, seed)
    if w is not None:
        return StabilityResult(Stability.UNSTABLE, w, detail="explicit point and triangular matrix")
    return StabilityResult(Stability.INCONCLUSIVE, detail="membership failed but no witness was found")


def _all_keys():
    return [(i, j, k) for i in range(1, 4) for j in range(1, 4) for k in range(1, 4)]


def _symbolic_constants(vars, Bm, adj):
    """Constants (times ``det``) in the basis ``Bm`` of the generic structure
    whose constants are the variables ``c_i_j_k``."""
    n = 3
    c = {k: MPoly.var(vars, _cname(*k)) for k in _all_keys()}
    out = {}
    for a in range(n):
        for bb in range(n):
            v = [MPoly(vars) for _ in range(n)]
            for p in range(n):
                if not Bm[a][p]:
                    continue
                for q in range(n):
                    if not Bm[bb][q]:
                        continue
                    f = Bm[a][p] * Bm[bb][q]
                    for r in range(n):
                        v[r] = v[r] + f * c[(p + 1, q + 1, r + 1)]
            for m in range(n):
                s = MPoly(vars)
                for r in range(n):
                    if adj[r][m]:
                        s = s + v[r] * adj[r][m]
                out[(a + 1, bb + 1, m + 1)] = s
    return out


def _random_point(R: RSetSpec, rng):
    """A random structure satisfying ``R`` (linear equations only), with a
    random value for each parameter."""
    pvals = {p: scalar(str(rng.randint(-5, 5))) for p in R.params}
    zero_keys = set(R.vanishing_constants())
    rows = []
    for eq in R.equations:
        e = as_scalar(specialize(eq, pvals))
        row = [ZERO] * 27
        const = ZERO
        if isinstance(e, ParamRational):
            if not e.is_polynomial():
                return None
            for mono, cf in e.numerator_terms().items():
                deg = sum(mono)
                if deg > 1:
                    return None
                if deg == 0:
                    const = cf
                else:
                    v = e.vars[mono.index(1)]
                    row[C_NAMES.index(v)] = cf
        else:
            const = e
        rows.append((row, const))
    for key in zero_keys:
        row = [ZERO] * 27
        row[C_NAMES.index(_cname(*key))] = ONE
        rows.append((row, ZERO))
    aug = [r + [-c] for r, c in rows]
    if not aug:
        aug = [[ZERO] * 28]
    red, piv = linalg.rref(aug)
    if 27 in piv:
        return None
    vals = [None] * 27
    free = [k for k in range(27) if k not in piv]
    for k in free:
        vals[k] = scalar(str(rng.randint(-3, 3)))
    for row, p in zip(red, piv):
        s = row[27]
        for k in free:
            if row[k]:
                s = s - row[k] * vals[k]
        vals[p] = s
    c = [[[vals[9 * i + 3 * j + k] for k in range(3)] for j in range(3)] for i in range(3)]
    return Algebra(3, c), pvals


def _stability_witness(R, seed, tries=50):
    rng = random.Random(seed)
    for _ in range(tries):
        pt = _random_point(R, rng)
        if pt is None:
            return None
        A, pvals = pt
        Rs = R.specialize(pvals) if pvals else R
        if not r_membership(A, None, Rs):
            continue
        b = [[scalar(str(rng.randint(1, 3))) if i == j else (scalar(str(rng.randint(-2, 2))) if j > i else ZERO)
              for j in range(3)] for i in range(3)]
        if not r_membership(A, b, Rs):
            return (A, tuple(tuple(r) for r in b))
    return None


# --------------------------------------------------------------------------
# propagation


def propagate(edges, nonedges):
    """Close non-degenerations under ``A -/-> C, A -> B  =>  B -/-> C`` and
    ``A -/-> C, B -> C  =>  A -/-> B``; ``edges`` must be transitively closed.
    Returns ``{(X, Y): (rule, A, B, C)}`` for the new pairs."""
    edges = set(edges)
    known = set(nonedges)
    out = {}
    succ, pred = {}, {}
    for a, b in edges:
        succ.setdefault(a, set()).add(b)
        pred.setdefault(b, set()).add(a)
    changed = True
    while changed:
        changed = False
        for a, c in sorted(known, key=str):
            for b in sorted(succ.get(a, ()), key=str):
                if b != c and (b, c) not in known and (b, c) not in edges:
                    known.add((b, c))
                    out[(b, c)] = ("source", a, b, c)
                    changed = True
            for b in sorted(pred.get(c, ()), key=str):
                if b != a and (a, b) not in known and (a, b) not in edges:
                    known.add((a, b))
                    out[(a, b)] = ("target", a, b, c)
                    changed = True
    return out
