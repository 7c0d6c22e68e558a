import pytest

from algdegen import graph
from algdegen.catalog import CatalogRef, Variety, parse_ref
from algdegen.config import GraphConfig
from algdegen.degeneration import orbit_dimension

r = parse_ref


@pytest.fixture(scope="module")
def leib():
    return graph.build_graph(Variety.LEIB3)


@pytest.fixture(scope="module")
def acom():
    return graph.build_graph(Variety.ACOM3)


def _names(xs):
    return {str(x) for x in xs}


def test_leibniz_components(leib):
    comps = {str(c.generic): _names(c.members) for c in graph.components(leib)}
    assert set(comps) == {"g3", "g4", "L4", "L5", "L6"}
    assert comps["L5"] == {"L5", "L4[alpha=2]", "L3", "L2", "C3"}
    assert comps["g4"] == {"g4", "g3[alpha=-1]", "g1", "C3"}
    assert comps["g3"] == {"g3", "g3[alpha=-1]", "g3[alpha=0]", "g3[alpha=1]", "g1", "g2", "C3"}
    assert comps["L6"] == {"L6", "L6[alpha=0]", "L6[alpha=1]", "L7", "L8", "L9", "L1[beta=0]", "L2", "C3"}
    assert comps["L4"] == {"L4", "L4[alpha=0]", "L4[alpha=1]", "L4[alpha=2]", "L1", "L1[beta=0]",
                           "L1[beta=1/4]", "L2", "L3", "L6[alpha=0]", "g1", "g3[alpha=0]", "C3"}


def test_acom_single_component(acom):
    comps = graph.components(acom)
    assert len(comps) == 1
    assert comps[0].generic == CatalogRef("A1")
    assert orbit_dimension(CatalogRef("A1")) == 9
    assert set(comps[0].members) == set(acom.nodes)


def test_every_node_reaches_zero(leib, acom):
    for G in (leib, acom):
        for n in G.nodes:
            if n.name != "C3":
                assert G.degenerates(n, CatalogRef("C3"))


def test_no_pair_is_both(leib, acom):
    for G in (leib, acom):
        assert not set(G.nonedges) & G.closure()
        assert G.check_consistency()


def test_leibniz_fully_resolved(leib):
    assert not leib.unresolved


def test_primary_reduction_generates_closure(leib):
    prim = set(graph.primary_reduction(leib))
    closure = set(prim)
    changed = True
    while changed:
        new = {(a, d) for a, b in closure for c, d in closure if b == c} - closure
        changed = bool(new)
        closure |= new
    assert closure == leib.closure()
    for a, b in prim:
        assert not any((a, c) in prim and (c, b) in leib.closure() for c in leib.nodes if c != b)
    assert (r("L9"), r("L8")) in prim


def test_generic_member_semantics(leib):
    # the union of L4 orbits reaches g1 through L4[0], the generic member does not
    assert leib.degenerates(r("L4"), r("g1"))
    assert not graph.generic_reaches(leib, r("L4"), r("g1"))
    assert graph.generic_reaches(leib, r("L4"), r("L1"))
    checks = dict((n, s) for n, s, _ in graph.pair_checks(r("L4"), r("g1")))
    assert checks["rset R(L4)"] == "BLOCKED"


def test_dot_export_is_deterministic(leib):
    a = graph.export_dot(leib)
    b = graph.export_dot(graph.build_graph(Variety.LEIB3))
    assert a == b
    assert '"L9" -> "L8";' in a
    lines = [ln for ln in a.splitlines() if "[label=" in ln]
    ders = [int(ln.split("der=")[1].rstrip("];")) for ln in lines]
    assert ders == sorted(ders)


def test_acom_unresolved_are_comments(acom):
    dot = graph.export_dot(acom, primary_only=False)
    for a, b in acom.unresolved:
        assert f"// unresolved: {a} -> {b}" in dot
    for n in acom.nodes:
        if n != CatalogRef("A1"):
            assert acom.degenerates(CatalogRef("A1"), n)


def test_invariants_only_config_leaves_more_open():
    G = graph.build_graph(Variety.LEIB3, GraphConfig(use_rsets=False, use_s_tuples=False, use_propagation=False))
    assert len(G.unresolved) > 0
