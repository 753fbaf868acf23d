"""Exact linear algebra over the rationals.

Everything in this package that reduces to linear algebra (nullspaces of
constant matrices, the division systems behind the cohomology maps, membership
solves) runs through the small routines here.  Matrices are plain lists of
lists of Fraction; dimensions stay tiny, so dense Gaussian elimination with
exact pivots is all that is needed.
"""

from fractions import Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def frac_matrix(rows):
    """Copy a nested sequence into a list-of-lists of Fraction."""
    return [[Fraction(x) for x in row] for row in rows]


def rref(matrix):
    """Reduced row echelon form.

    Returns (echelon, pivot_columns).  The input is not modified.
    """
    m = [row[:] for row in matrix]
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        pivot_row = None
        for i in range(r, nrows):
            if m[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        m[r], m[pivot_row] = m[pivot_row], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for i in range(nrows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return m, pivots


def rank(matrix):
    if not matrix or not matrix[0]:
        return 0
    return len(rref(matrix)[1])


def nullspace(matrix, ncols=None):
    """Basis of the right kernel, in the reduced-echelon convention.

    One basis vector per free column, carrying 1 in that column; columns are
    scanned left to right, so the result is deterministic.
    """
    if not matrix:
        if ncols is None:
            raise ValueError("empty matrix needs an explicit column count")
        return [[ONE if j == i else ZERO for j in range(ncols)]
                for i in range(ncols)]
    ncols = len(matrix[0])
    ech, pivots = rref(matrix)
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for fc in free:
        v = [ZERO] * ncols
        v[fc] = ONE
        for r, pc in enumerate(pivots):
            v[pc] = -ech[r][fc]
        basis.append(v)
    return basis


def solve(matrix, rhs):
    """One exact solution of matrix @ x = rhs, or None if inconsistent.

    Free variables are set to zero, which makes the returned solution
    canonical for a fixed unknown ordering.
    """
    nrows = len(matrix)
    if nrows == 0:
        return [] if all(b == 0 for b in rhs) else None
    ncols = len(matrix[0])
    aug = [matrix[i][:] + [Fraction(rhs[i])] for i in range(nrows)]
    ech, pivots = rref(aug)
    if ncols in pivots:
        return None
    x = [ZERO] * ncols
    for r, pc in enumerate(pivots):
        x[pc] = ech[r][ncols]
    return x


def solve_unique(matrix, rhs):
    """Solution of a system required to have exactly one; None otherwise."""
    nrows = len(matrix)
    ncols = len(matrix[0]) if nrows else 0
    x = solve(matrix, rhs)
    if x is None:
        return None
    if rank(matrix) != ncols:
        return None
    return x


def is_invertible(matrix):
    n = len(matrix)
    if n == 0:
        return True
    if any(len(row) != n for row in matrix):
        return False
    return rank(matrix) == n


def matvec(matrix, vec):
    return [sum((row[j] * vec[j] for j in range(len(vec))), ZERO)
            for row in matrix]


def matmul(a, b):
    if not a or not b:
        return []
    n, k, m = len(a), len(b), len(b[0])
    return [[sum((a[i][t] * b[t][j] for t in range(k)), ZERO)
             for j in range(m)] for i in range(n)]


def transpose(matrix):
    if not matrix:
        return []
    return [list(col) for col in zip(*matrix)]


def identity(n):
    return [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]
