import sympy as sp
from hypothesis import given

from algdegen import linalg
from algdegen.scalar import GaussianRational
from strategies import from_sympy, gaussians, matrices, to_sympy


def _sym(m):
    return sp.Matrix([[to_sympy(x) for x in row] for row in m])


@given(matrices(3, gaussians()))
def test_det_and_rank_match_sympy(m):
    M = _sym(m)
    assert linalg.det(m) == from_sympy(M.det())
    assert linalg.rank(m) == M.rank()


@given(matrices(3))
def test_nullspace_is_kernel(m):
    ns = linalg.nullspace(m, 3)
    assert len(ns) == 3 - _sym(m).rank()
    for v in ns:
        for row in m:
            assert sum((a * b for a, b in zip(row, v)), GaussianRational(0)) == 0


@given(matrices(3, gaussians()))
def test_inverse_and_adjugate(m):
    d = linalg.det(m)
    if not d:
        return
    inv = linalg.inverse(m)
    ident = linalg.matmul(m, inv)
    assert ident == linalg.identity(3)
    adj = linalg.adjugate(m)
    assert linalg.matmul(m, adj) == [[d if i == j else 0 for j in range(3)] for i in range(3)]


def test_permutation_matrices():
    perms = list(linalg.permutation_matrices(3))
    assert len(perms) == 6
    assert {abs(int(linalg.det(P).re)) for _, P in perms} == {1}


def test_subspace_dim_and_contains():
    e1 = [GaussianRational(1), GaussianRational(0), GaussianRational(0)]
    e2 = [GaussianRational(0), GaussianRational(1), GaussianRational(0)]
    S = linalg.Subspace([e1, e2, [GaussianRational(2), GaussianRational(3), GaussianRational(0)]], 3)
    assert S.dim == 2
    assert S.contains([GaussianRational(5), GaussianRational(-1), GaussianRational(0)])
    assert not S.contains([GaussianRational(0), GaussianRational(0), GaussianRational(1)])
