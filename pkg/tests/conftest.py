"""Shared deterministic generators for the test suites.

Every generator takes an explicit random.Random so each test controls its
own seed; nothing here touches global state.
"""

from fractions import Fraction

from varpoisson.diffpoly import DiffPoly
from varpoisson.matop import MatDiffOp
from varpoisson.polyvec import LambdaPoly, PolyVector, antisymmetrize
from varpoisson import linalg


def rand_frac(rng, span=3):
    num = rng.randint(-span, span)
    den = rng.randint(1, span)
    return Fraction(num, den)


def rand_poly(rng, ell, max_order=2, max_degree=2, terms=3):
    """Random differential polynomial with small exact coefficients."""
    out = DiffPoly()
    for _ in range(terms):
        degree = rng.randint(0, max_degree)
        mono = DiffPoly._coerce(1)
        for _ in range(degree):
            i = rng.randint(1, ell)
            n = rng.randint(0, max_order)
            mono = mono * DiffPoly.var(i, n)
        c = rand_frac(rng)
        if c:
            out = out + mono * c
    return out


def rand_quasiconstant_op(rng, ell, max_pow=2):
    """Random constant-coefficient operator, not symmetrized."""
    grid = []
    for _ in range(ell):
        row = []
        for _ in range(ell):
            entry = {}
            for p in range(max_pow + 1):
                c = rand_frac(rng)
                if c and rng.random() < 0.7:
                    entry[p] = DiffPoly._coerce(c)
            row.append(entry)
        grid.append(row)
    return MatDiffOp(grid)


def rand_skew_quasiconstant(rng, ell, max_pow=2):
    A = rand_quasiconstant_op(rng, ell, max_pow)
    return A - A.adjoint()


def rand_poly_op(rng, ell, max_pow=2, max_order=1, max_degree=1):
    """Random operator with differential polynomial coefficients."""
    grid = []
    for _ in range(ell):
        row = []
        for _ in range(ell):
            entry = {}
            for p in range(max_pow + 1):
                if rng.random() < 0.5:
                    c = rand_poly(rng, ell, max_order, max_degree, terms=2)
                    if c:
                        entry[p] = c
            row.append(entry)
        grid.append(row)
    return MatDiffOp(grid)


def rand_skew_op(rng, ell, max_pow=2, max_order=1, max_degree=1):
    A = rand_poly_op(rng, ell, max_pow, max_order, max_degree)
    return A - A.adjoint()


def rand_symmetric_nondegenerate(rng, ell, span=3):
    """Random symmetric matrix over the rationals with full rank."""
    while True:
        S = [[Fraction(0)] * ell for _ in range(ell)]
        for i in range(ell):
            for j in range(i, ell):
                c = rand_frac(rng, span)
                S[i][j] = c
                S[j][i] = c
        if linalg.is_invertible(S):
            return S


def rand_lambda_poly(rng, nslots, ell, max_exp=1, max_order=1, max_degree=1, terms=2):
    out = LambdaPoly.zero(nslots)
    for _ in range(terms):
        exps = tuple(rng.randint(0, max_exp) for _ in range(nslots))
        c = rand_poly(rng, ell, max_order, max_degree, terms=1)
        if c:
            out = out + LambdaPoly(nslots, {exps: c})
    return out


def rand_polyvector(rng, degree, ell, max_exp=1, max_order=1, max_degree=1):
    """Random polyvector built by skew-symmetrizing raw random entries."""
    if degree == -1:
        return PolyVector.from_functional(rand_poly(rng, ell, max_order, max_degree), ell)
    raw = {}
    import itertools

    for idx in itertools.product(range(1, ell + 1), repeat=degree + 1):
        if rng.random() < 0.6:
            ent = rand_lambda_poly(rng, degree + 1, ell, max_exp, max_order, max_degree)
            if ent:
                raw[idx] = ent
    return antisymmetrize(degree, ell, raw)
