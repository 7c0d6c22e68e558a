import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from algdegen import catalog, linalg
from algdegen.algebra import Algebra, change_basis, derivation_dim, is_anticommutative, is_leibniz, is_lie
from algdegen.catalog import (
    CatalogError,
    CatalogRef,
    NotAnticommutative,
    ParameterRequired,
    Unknown,
    UnknownName,
    Variety,
    acom_matrix,
    canonical_parameter,
    congruent,
    from_acom_matrix,
    identify,
    lift_to_dim4,
    parse_ref,
    pencil_invariant,
)
from algdegen.scalar import GaussianRational, scalar
from strategies import gaussians, invertible_matrices


def _concrete(A):
    return Algebra(A.dim, A.c, A.params, A.name)


@pytest.mark.parametrize("ref", catalog.all_refs(), ids=str)
def test_table_der_matches_computation(ref):
    assert derivation_dim(catalog.get(ref)) == catalog.table_der(ref)


@pytest.mark.parametrize("ref", catalog.all_refs(), ids=str)
def test_identities_by_variety(ref):
    A = catalog.get(ref)
    e = ref.entry
    if Variety.LEIB3 in e.varieties:
        assert is_leibniz(A)
    if e.anticommutative:
        assert is_anticommutative(A)
    if Variety.LIE3 in e.varieties:
        assert is_lie(A)


def test_lookup_errors():
    with pytest.raises(UnknownName):
        catalog.entry("L10")
    with pytest.raises(ParameterRequired):
        catalog.get("L4", symbolic=False)
    with pytest.raises(CatalogError):
        CatalogRef("L2", scalar("1"))


@given(gaussians(allow_zero=False))
def test_canonical_parameter_is_involution_invariant(a):
    for name in ("g3", "A1", "L6"):
        assert canonical_parameter(name, a) == canonical_parameter(name, GaussianRational(1) / a)
    assert canonical_parameter("L4", a) == a


def test_parse_ref_forms():
    assert parse_ref("L4[alpha=2]") == parse_ref("L4[2]") == CatalogRef("L4", scalar("2"))
    assert str(parse_ref("g3[2]")) == "g3[alpha=1/2]"
    assert parse_ref("L1").is_generic


def test_acom_matrix_round_trip():
    for ref in catalog.all_refs(Variety.ACOM3):
        A = catalog.get(ref)
        back = from_acom_matrix(acom_matrix(A), A.params)
        assert back.c == A.c
    with pytest.raises(NotAnticommutative):
        acom_matrix(catalog.get("L2"))


@pytest.mark.parametrize("ref", [r for r in catalog.all_refs(Variety.ACOM3) if r.name != "C3"], ids=str)
def test_lift_adds_four_derivations(ref):
    A = catalog.get(ref)
    assert derivation_dim(lift_to_dim4(A)) == derivation_dim(A) + 4


@settings(max_examples=8)
@given(st.sampled_from(["g3", "A1"]), invertible_matrices())
def test_congruent_reflexive_symmetric_and_invariant(name, X):
    M = acom_matrix(catalog.get(name, scalar("2")))
    Xt = [list(r) for r in zip(*X)]
    N = linalg.matmul(linalg.matmul(Xt, M), X)
    assert congruent(M, M)
    assert congruent(M, N) and congruent(N, M)
    pm, pn = pencil_invariant(M), pencil_invariant(N)
    d2 = linalg.det(X) ** 2
    if pm is None:
        assert pn is None
    else:
        assert list(pn) == [d2 * x for x in pm]


def test_congruence_examples():
    g = lambda a: acom_matrix(catalog.get("g3", scalar(a)))  # noqa: E731
    a = lambda x: acom_matrix(catalog.get("A1", scalar(x)))  # noqa: E731
    assert congruent(g("2"), g("1/2"))
    assert congruent(a("2"), a("1/2"))
    assert not congruent(g("2"), g("3"))


@settings(max_examples=6)
@given(st.sampled_from(["g3", "L4", "L6", "L1"]), gaussians(allow_zero=False), invertible_matrices())
def test_identify_after_base_change(name, a, M):
    ref = CatalogRef(name, a)
    B = _concrete(change_basis(catalog.get(ref), M))
    variety = Variety.LEIB3
    assert identify(B, variety) == ref


def test_identify_rejects_foreign():
    sym = Algebra.from_products(3, {(1, 1): [1, 0, 0]})
    with pytest.raises(Unknown):
        identify(sym, Variety.LEIB3)


def test_dump_is_deterministic():
    assert catalog.dump_catalog() == catalog.dump_catalog()
    assert "name = L4" in catalog.dump_catalog(Variety.LEIB3)
