"""Dense exact linear algebra over the scalar tower.

Elimination routines (``rref``, ``nullspace``) need field entries
(Gaussian rationals or parameter functions).  ``det`` and ``adjugate`` use
cofactor expansion and so work over Laurent polynomials as well; matrices here
are at most 4x4.
"""

from __future__ import annotations

from itertools import permutations

from .scalar import ONE, ZERO, as_scalar


def zeros(n, m=None):
    m = n if m is None else m
    return [[ZERO] * m for _ in range(n)]


def identity(n):
    return [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]


def rref(rows):
    """Reduced row-echelon form.  Returns ``(rows, pivots)`` with zero rows
    dropped; pivot entries are 1 and pivots are leftmost."""
    a = [[as_scalar(x) for x in r] for r in rows]
    if not a:
        return [], []
    ncols = len(a[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = None
        for k in range(r, len(a)):
            if a[k][c]:
                piv = k
                break
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = ONE / a[r][c]
        a[r] = [x * inv if x else x for x in a[r]]
        for k in range(len(a)):
            if k != r and a[k][c]:
                f = a[k][c]
                a[k] = [x - f * y if y else x for x, y in zip(a[k], a[r])]
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    return [tuple(row) for row in a[:r]], pivots


def rank(rows):
    return len(rref(rows)[0])


def nullspace(rows, ncols=None):
    """Basis of ``{x : rows * x = 0}`` (right kernel), one vector per free column."""
    if not rows:
        n = ncols or 0
        return [tuple(ONE if i == j else ZERO for i in range(n)) for j in range(n)]
    red, pivots = rref(rows)
    n = len(rows[0])
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [ZERO] * n
        v[f] = ONE
        for row, p in zip(red, pivots):
            if row[f]:
                v[p] = -row[f]
        basis.append(tuple(v))
    return basis


def det(m):
    n = len(m)
    if n == 0:
        return ONE
    if n == 1:
        return as_scalar(m[0][0])
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    total = ZERO
    for j in range(n):
        if not m[0][j]:
            continue
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def adjugate(m):
    n = len(m)
    if n == 1:
        return [[ONE]]
    adj = zeros(n)
    for i in range(n):
        for j in range(n):
            minor = [row[:j] + row[j + 1:] for k, row in enumerate(m) if k != i]
            d = det(minor)
            adj[j][i] = d if (i + j) % 2 == 0 else -d
    return adj


def matmul(a, b):
    n, k, m = len(a), len(b), len(b[0])
    out = zeros(n, m)
    for i in range(n):
        for j in range(m):
            s = ZERO
            for l in range(k):
                if a[i][l] and b[l][j]:
                    s = s + a[i][l] * b[l][j]
            out[i][j] = s
    return out


def transpose(a):
    return [list(r) for r in zip(*a)]


def inverse(m):
    """Field inverse via the adjugate."""
    d = det(m)
    if not d:
        raise ZeroDivisionError("singular matrix")
    inv = ONE / d
    return [[x * inv for x in row] for row in adjugate(m)]


def permutation_matrices(n):
    for p in permutations(range(n)):
        yield p, [[ONE if p[i] == j else ZERO for j in range(n)] for i in range(n)]


class Subspace:
    """Subspace of coordinate space stored as an RREF basis."""

    __slots__ = ("ambient", "rows", "pivots")

    def __init__(self, vectors, ambient):
        self.ambient = ambient
        self.rows, self.pivots = rref(list(vectors)) if vectors else ([], [])

    @property
    def dim(self):
        return len(self.rows)

    def __len__(self):
        return self.dim

    def contains(self, v):
        return rank(list(self.rows) + [list(v)]) == self.dim

    def __eq__(self, other):
        return isinstance(other, Subspace) and self.ambient == other.ambient and self.rows == other.rows

    def __hash__(self):
        return hash((self.ambient, self.rows))

    def __repr__(self):
        body = ", ".join("(" + ", ".join(str(x) for x in r) + ")" for r in self.rows)
        return f"Subspace(dim={self.dim}, [{body}])"
