"""Acceptance criteria 1-11.  Each test prints one ``ACCEPTANCE n PASS|FAIL``
line (shown even without ``-s``) and then asserts."""

import random
import time

import pytest

from algdegen import catalog, graph, linalg
from algdegen.algebra import (
    Algebra,
    IdentityKind,
    change_basis,
    check_identity,
    derivation_dim,
    is_anticommutative,
    is_leibniz,
    left_annihilator,
    plus_square,
)
from algdegen.catalog import CatalogRef, Variety, acom_matrix, congruent, identify, lift_to_dim4, parse_ref
from algdegen.degeneration import orbit_dimension, table, verify_certificate
from algdegen.groebner import Budget
from algdegen.obstruction import (
    RSET_L4,
    RSET_L5,
    TABLE_BASIS,
    Verdict,
    orbit_avoids_rset,
    r_membership,
    s_tuple,
    s_tuple_obstruction,
)
from algdegen.scalar import GaussianRational, scalar

ACOM_ROWS = ["g1", "g2", "g3", "g4", "A1", "A2", "A3"]
LEIB_ROWS = [f"L{k}" for k in range(1, 10)]


@pytest.fixture
def report(capsys):
    def _report(n, ok, detail):
        with capsys.disabled():
            print(f"\nACCEPTANCE {n:2d} {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail

    return _report


def test_criterion_01_derivation_dimensions(report):
    t0 = time.perf_counter()
    expected = {"g1": 6, "g2": 6, "g3": 4, "g4": 3, "A1": 1, "A2": 2, "A3": 3,
                "L1": 4, "L2": 5, "L3": 4, "L4": 3, "L5": 2, "L6": 2, "L7": 2, "L8": 3, "L9": 2,
                "L6[0]": 3, "L6[1]": 4}
    bad = {k: derivation_dim(catalog.get(parse_ref(k))) for k in expected}
    bad = {k: v for k, v in bad.items() if v != expected[k]}
    dt = time.perf_counter() - t0
    report(1, not bad and dt < 1, f"{len(expected)} Der values (7 + 9 rows, L6 specials), mismatches {bad}, {dt:.2f}s")


def test_criterion_02_identity_audit(report):
    t0 = time.perf_counter()
    fails = []
    for n in LEIB_ROWS:
        if not is_leibniz(catalog.get(n)):
            fails.append(f"{n} not Leibniz")
    for n in ACOM_ROWS:
        if not is_anticommutative(catalog.get(n)):
            fails.append(f"{n} not anticommutative")
    for n in ("g1", "g2", "g3", "g4"):
        if not check_identity(catalog.get(n), IdentityKind.JACOBI):
            fails.append(f"{n} fails Jacobi")
    for n in ("A1", "A2", "A3"):
        if check_identity(catalog.get(n), IdentityKind.JACOBI):
            fails.append(f"{n} satisfies Jacobi")
    dt = time.perf_counter() - t0
    report(2, not fails and dt < 1, f"identities {fails or 'as expected'}, {dt:.2f}s")


def test_criterion_03_certificate_suite(report):
    t0 = time.perf_counter()
    certs = list(table("a3")) + list(table("a5")) + list(table("sec4"))
    reps = [verify_certificate(c) for c in certs]
    bad = [r.certificate.name for r in reps if not r.valid]
    l4 = next(r for r in reps if r.certificate.name == "a3.4")
    exc_ok = l4.exceptions.as_set() == {scalar("2")} and not l4.exceptions.factors
    dt = time.perf_counter() - t0
    counts = f"{len(table('a3'))} degeneration rows, {len(table('a5'))} indexed rows, {len(table('sec4'))} family rows"
    report(3, not bad and exc_ok and dt < 5,
           f"{counts}; failures {bad}; L4 row exceptions {l4.exceptions}; {dt:.2f}s")


def test_criterion_04_s_tuples(report):
    expected = {"L4": ("alpha", "0", "1", "-1"), "L5": ("2", "0", "1", "-1"), "L6": ("alpha", "0", "1", "0"),
                "L7": ("1", "0", "1", "0"), "L9": ("0", "0", "1", "0")}
    bad = []
    for n, tup in expected.items():
        want = tuple(scalar(x, ("alpha",)) for x in tup)
        if s_tuple(catalog.get(n)) != want:
            bad.append(n)
    report(4, not bad, f"S-tuples of {sorted(expected)} recomputed, mismatches {bad}")


def _st(text):
    return catalog.s_tuple_of_entry(parse_ref(text))


def test_criterion_05_s_tuple_obstructions(report):
    results = {}
    # per-member argument for the L6 family: exceptions must be exactly the excluded value
    r = s_tuple_obstruction([_st("L6")], _st("L6[0]"), identically=False)
    results["L6(a!=0) -/-> L6^0"] = r.obstructed and set(r.exceptions) <= {scalar("0")}
    results["L7 -/-> L6^0"] = s_tuple_obstruction([_st("L7")], _st("L6[0]")).obstructed
    results["L4^a -/-> L6^1"] = s_tuple_obstruction([_st("L4")], _st("L6[1]"), identically=True).obstructed
    results["L5 -/-> L6^1"] = s_tuple_obstruction([_st("L5")], _st("L6[1]")).obstructed
    r = s_tuple_obstruction([_st("L6")], _st("L6[1]"), identically=False)
    results["L6(a!=1) -/-> L6^1"] = r.obstructed and set(r.exceptions) <= {scalar("1")}
    results["L9 -/-> L6^1"] = s_tuple_obstruction([_st("L9")], _st("L6[1]")).obstructed
    bad = [k for k, v in results.items() if not v]
    report(5, not bad, f"{len(results)} S-tuple obstructions, failures {bad}")


def _ann(x):
    return left_annihilator(catalog.get(parse_ref(x))).dim


def _ps(x):
    return plus_square(catalog.get(parse_ref(x))).dim


def test_criterion_06_invariant_obstructions(report):
    rows = []
    l1_members = ["L1", "L1[1/4]", "L1[2]", "L1[-1+i]"]  # beta != 0: generic plus samples
    for a in ("L6", "L7", "L9", "L6[2]", "L6[1/3]"):
        for b in l1_members + ["L3", "L4[1]", "g1", "g2"]:
            rows.append(("ann", a, b))
    for b in ("L6[1]", "L8"):
        rows.append(("ps", "L4", b))
    for b in ("g2", "g3", "g3[1]", "g3[-1]", "g3[2]"):
        rows.append(("ann", "L4", b))
    for b in ["g1", "g2", "L3", "L4[1]"] + l1_members:
        rows.append(("ann", "L6", b))
    bad = []
    for kind, a, b in rows:
        ok = _ann(a) > _ann(b) if kind == "ann" else _ps(a) < _ps(b)
        if not ok:
            bad.append((kind, a, b))
    report(6, not bad, f"{len(rows)} Ann_L / A^(+2) inequalities, failures {bad}")


def test_criterion_07_rset_arguments(report):
    budget = Budget(max_seconds=300)
    member = (r_membership(CatalogRef("L4"), TABLE_BASIS, RSET_L4)
              and r_membership(CatalogRef("L5"), TABLE_BASIS, RSET_L5))
    required = [("g2", RSET_L5, {}), ("L3", RSET_L4, {"alpha": scalar("0")}), ("g1", RSET_L5, {})]
    optional = [("g1", RSET_L4, {}), ("g2", RSET_L4, {}), ("L3", RSET_L4, {}), ("L1[5]", RSET_L5, {}),
                ("g3[2]", RSET_L4, {"alpha": scalar("1")})]
    lines, proven, req_ok = [], 0, True
    for k, (b, R, bind) in enumerate(required + optional):
        t0 = time.perf_counter()
        res = orbit_avoids_rset(parse_ref(b), R, bind, budget=budget)
        ok = res.verdict is Verdict.PROVEN
        proven += ok
        if k < len(required) and not ok:
            req_ok = False
        exc = f" exc {{{', '.join(map(str, res.exceptions))}}}" if res.exceptions else ""
        lines.append(f"{b}/{R.name}{bind or ''}: {res.verdict.value}{exc} {time.perf_counter() - t0:.1f}s")
    report(7, member and req_ok and proven >= 3,
           f"membership {member}; {proven} Proven; " + "; ".join(lines))


EXPECTED_COMPONENTS = {
    "g3": {"g1", "g2", "g3", "g3[alpha=-1]", "g3[alpha=0]", "g3[alpha=1]", "C3"},
    "g4": {"g1", "g3[alpha=-1]", "g4", "C3"},
    "L4": {"g1", "g3[alpha=0]", "L1", "L1[beta=0]", "L1[beta=1/4]", "L2", "L3", "L4", "L4[alpha=0]",
           "L4[alpha=1]", "L4[alpha=2]", "L6[alpha=0]", "C3"},
    "L5": {"L2", "L3", "L4[alpha=2]", "L5", "C3"},
    "L6": {"L1[beta=0]", "L2", "L6", "L6[alpha=0]", "L6[alpha=1]", "L7", "L8", "L9", "C3"},
}


def test_criterion_08_components(report):
    G = graph.build_graph(Variety.LEIB3)
    got = {str(c.generic): {str(m) for m in c.members} for c in graph.components(G)}
    H = graph.build_graph(Variety.ACOM3)
    ac = graph.components(H)
    acom_ok = (len(ac) == 1 and ac[0].generic == CatalogRef("A1") and orbit_dimension(CatalogRef("A1")) == 9
               and set(ac[0].members) == set(H.nodes))
    report(8, got == EXPECTED_COMPONENTS and acom_ok,
           f"Leib3 components {sorted(got)} match: {got == EXPECTED_COMPONENTS}; "
           f"ACom3 single component from A1 (orbit dim 9): {acom_ok}")


def test_criterion_09_lift(report):
    bad = []
    refs = [r for r in catalog.all_refs(Variety.ACOM3) if r.name != "C3"]
    for ref in refs:
        A = catalog.get(ref)
        if derivation_dim(lift_to_dim4(A)) != derivation_dim(A) + 4:
            bad.append(str(ref))
    report(9, not bad, f"{len(refs)} anticommutative entries lifted, failures {bad}")


def _random_basis(rng):
    while True:
        M = [[GaussianRational(rng.randint(-2, 2)) for _ in range(3)] for _ in range(3)]
        if linalg.det(M):
            return M


def test_criterion_10_identification(report):
    budget = Budget(max_seconds=60)
    cong = (congruent(acom_matrix(catalog.get("g3", scalar("2"))), acom_matrix(catalog.get("g3", scalar("1/2"))),
                      budget)
            and congruent(acom_matrix(catalog.get("A1", scalar("2"))),
                          acom_matrix(catalog.get("A1", scalar("1/2"))), budget))
    rng = random.Random(2024)
    bad, count = [], 0
    sample = {"alpha": scalar("3/2"), "beta": scalar("3/2")}
    for variety in (Variety.ACOM3, Variety.LEIB3):
        for ref in catalog.all_refs(variety):
            if ref.is_generic:
                ref = CatalogRef(ref.name, sample[ref.entry.param])
            A = catalog.get(ref)
            moved = change_basis(A, _random_basis(rng))
            for X in (A, Algebra(3, moved.c)):
                count += 1
                try:
                    got = identify(X, variety, budget=budget)
                except Exception as exc:  # record and keep going
                    got = f"{type(exc).__name__}"
                if got != ref:
                    bad.append(f"{ref}->{got}")
    report(10, cong and not bad, f"congruences {cong}; {count} identify round trips, failures {bad}")


def test_criterion_11_consistency(report):
    problems = []
    for variety in (Variety.LIE3, Variety.ACOM3, Variety.LEIB3):
        G = graph.build_graph(variety)
        try:
            G.check_consistency()
        except graph.InconsistentEvidence as exc:
            problems.append(str(exc))
        for (a, b), e in G.edges.items():
            if e.kind not in ("certificate", "instance"):
                continue
            da, db = graph.node_der(a), graph.node_der(b)
            if not a.is_generic and not da < db:
                problems.append(f"Der {a}->{b}")
            if a.is_generic and not orbit_dimension(a) > orbit_dimension(b):
                problems.append(f"orbit dim {a}->{b}")
            if _ann(str(a)) > _ann(str(b)) or _ps(str(a)) < _ps(str(b)):
                problems.append(f"Ann/plus-square {a}->{b}")
        if set(G.nonedges) & G.closure():
            problems.append(f"{variety.value}: pair with both certificate and obstruction")
    report(11, not problems, f"three graphs checked exhaustively, problems {problems}")
