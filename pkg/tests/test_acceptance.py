"""End-to-end acceptance suite.

Each test pins one headline property of the library at its stated scale:
exact cohomology dimensions in the translation-invariant case, the strict
bound dichotomy, superalgebra dimensions and prolongations, the structure
constant isomorphism, bracket algebra laws, the complex property, the
inner product lemmas, essential vanishing, the classical Lenard chain, the
Casimir dimension formula, and the parser round trip.  All arithmetic is
exact; the asserted time budgets are generous on commodity hardware.
"""

import itertools
import json
import random
import subprocess
import sys
import time
from fractions import Fraction
from math import comb

from varpoisson import linalg
from varpoisson.cli import parse_expr, print_expr
from varpoisson.diffpoly import (
    DiffPoly,
    LocalFunctional,
    evolutionary_apply,
    functional_equal,
    total_derivative,
    u,
    variational_derivative,
)
from varpoisson.hamcoh import (
    a_space_member,
    casimir_basis,
    cohomology_dimensions,
    delta_K,
    gram_on_kernel,
    inner_product,
    is_essential,
)
from varpoisson.magri import build_hierarchy
from varpoisson.matop import MatDiffOp, d_operator
from varpoisson.polyvec import (
    LambdaPoly,
    PolyVector,
    bracket_k_functional,
    bracket_op_functional,
    bracket_vf_functional,
    bracket_vf_op,
    from_operator,
    lambda_bracket,
    normalize,
    schouten,
)
from varpoisson.superlie import (
    full_prolongation,
    htilde_dims,
    iso_check_translation_case,
    so_basis,
)

from conftest import (
    rand_poly,
    rand_polyvector,
    rand_poly_op,
    rand_quasiconstant_op,
    rand_skew_op,
    rand_skew_quasiconstant,
    rand_symmetric_nondegenerate,
)


def _one():
    return DiffPoly._coerce(1)


def _kdv_op():
    return MatDiffOp([[{3: _one(), 1: 2 * u(1), 0: u(1, 1)}]])


def _s_times_d(S):
    ell = len(S)
    rows = []
    for i in range(ell):
        row = []
        for j in range(ell):
            c = Fraction(S[i][j])
            row.append({1: DiffPoly.const(c)} if c else {})
        rows.append(row)
    return MatDiffOp(rows)


def _identity(n):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def _inverse(S):
    n = len(S)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(S)]
    red = linalg.rref(aug)[0]
    return [r[n:] for r in red]


def _skew_value(subset, idx):
    """Elementary totally skew array supported on `subset`, at `idx`."""
    if len(set(idx)) != len(idx) or sorted(idx) != list(subset):
        return 0
    perm = [subset.index(x) for x in idx]
    sign = 1
    for a in range(len(perm)):
        for b in range(a + 1, len(perm)):
            if perm[a] > perm[b]:
                sign = -sign
    return sign


def test_translation_invariant_dimensions():
    """dim H^k = binom(ell+1, k+2) for K = S d with S nondegenerate."""
    rng = random.Random(1001)
    for ell in (1, 2, 3):
        for _ in range(3):
            S = rand_symmetric_nondegenerate(rng, ell)
            K = _s_times_d(S)
            start = time.monotonic()
            reports = cohomology_dimensions(K, ell)
            elapsed = time.monotonic() - start
            assert elapsed < 10.0
            for rep in reports:
                assert rep.dim == comb(ell + 1, rep.k + 2)
                assert rep.bound == rep.dim
                assert rep.attained


def test_strict_bound_dichotomy():
    """Third-order scalar operator undershoots every bound; S d attains all."""
    start = time.monotonic()
    d3 = MatDiffOp([[{3: _one()}]])
    reports = cohomology_dimensions(d3, 0)
    assert reports[0].k == -1 and reports[0].dim == 2 and reports[0].bound == 4
    assert reports[1].k == 0 and reports[1].dim == 2 and reports[1].bound == 6
    assert not reports[0].attained and not reports[1].attained
    rng = random.Random(1002)
    S = rand_symmetric_nondegenerate(rng, 2)
    for rep in cohomology_dimensions(_s_times_d(S), 2):
        assert rep.attained and rep.dim == comb(3, rep.k + 2)
    assert time.monotonic() - start < 10.0


def test_superalgebra_dimensions_and_prolongations():
    """Quotient superalgebra dims are binomial; both prolongation branches match."""
    start = time.monotonic()
    for n in range(1, 9):
        dims = htilde_dims(n, _identity(n))
        assert dims == tuple(comb(n, k + 2) for k in range(-1, n - 1))
        assert sum(dims) == 2**n - 1
    for n in range(2, 6):
        nondeg = _identity(n)
        corank1 = _identity(n)
        corank1[n - 1][n - 1] = Fraction(0)
        for S in (nondeg, corank1):
            g = so_basis(n, S)
            for k in range(-1, n):
                dim, basis = full_prolongation(n, g, k)
                assert dim == comb(n, k + 2)
                assert len(basis) == dim
    assert time.monotonic() - start < 30.0


def test_structure_constant_isomorphism():
    """Bracket tables match between the two models of the same algebra."""
    start = time.monotonic()
    cases = [
        (1, [[1]]),
        (2, _identity(2)),
        (2, [[1, 0], [0, 2]]),
        (3, _identity(3)),
    ]
    for ell, S in cases:
        assert iso_check_translation_case(ell, S)
    assert time.monotonic() - start < 60.0


def test_bracket_algebra_properties():
    """Graded skew-symmetry, Jacobi, and the specialized bracket formulas."""
    start = time.monotonic()
    rng = random.Random(1005)
    for _ in range(100):
        while True:
            p, q, r = (rng.randint(-1, 2) for _ in range(3))
            if p + q + r <= 3:
                break
        ell = rng.randint(1, 2)
        P = rand_polyvector(rng, p, ell, max_order=2)
        Q = rand_polyvector(rng, q, ell, max_order=2)
        R = rand_polyvector(rng, r, ell, max_order=2)
        PQ = schouten(P, Q)
        assert PQ == schouten(Q, P).scale(-((-1) ** (p * q)))
        lhs = schouten(P, schouten(Q, R))
        rhs = schouten(PQ, R) + schouten(Q, schouten(P, R)).scale((-1) ** (p * q))
        assert (lhs - rhs).is_zero()

    for _ in range(50):
        ell = rng.randint(1, 2)
        k = rng.randint(0, 2)
        Q = rand_polyvector(rng, k, ell, max_order=2)
        h = rand_poly(rng, ell)
        assert bracket_k_functional(Q, h) == schouten(
            Q, PolyVector.from_functional(h, ell)
        )

    for _ in range(50):
        ell = rng.randint(1, 2)
        P = [rand_poly(rng, ell) for _ in range(ell)]
        h = rand_poly(rng, ell)
        generic = schouten(
            PolyVector.from_characteristic(P), PolyVector.from_functional(h, ell)
        )
        assert generic.functional() == bracket_vf_functional(P, h)

    for _ in range(50):
        ell = rng.randint(1, 2)
        H = rand_skew_op(rng, ell)
        h = rand_poly(rng, ell)
        generic = schouten(from_operator(H), PolyVector.from_functional(h, ell))
        assert generic == PolyVector.from_characteristic(bracket_op_functional(H, h))

    for _ in range(50):
        ell = rng.randint(1, 2)
        P = [rand_poly(rng, ell) for _ in range(ell)]
        H = rand_skew_op(rng, ell)
        special = bracket_vf_op(P, H)
        generic = schouten(PolyVector.from_characteristic(P), from_operator(H))
        assert from_operator(special) == generic

    for _ in range(50):
        ell = rng.randint(1, 2)
        H = rand_skew_op(rng, ell)
        f = rand_poly(rng, ell)
        g = rand_poly(rng, ell)
        at_zero = lambda_bracket(H, f, g).terms.get((0,), DiffPoly())
        nested = schouten(
            schouten(from_operator(H), PolyVector.from_functional(f, ell)),
            PolyVector.from_functional(g, ell),
        )
        assert functional_equal(at_zero, nested.functional().rep)
    assert time.monotonic() - start < 120.0


def test_differential_squares_to_zero():
    """The complex property over random constant-coefficient operators."""
    rng = random.Random(1006)
    count = 0
    for trial in range(20):
        ell = rng.randint(1, 2)
        if trial % 2:
            K = rand_skew_quasiconstant(rng, ell)
        else:
            K = rand_quasiconstant_op(rng, ell)
            if K.is_skewadjoint():
                K = K + MatDiffOp(
                    [
                        [{0: _one()} if i == j else {} for j in range(ell)]
                        for i in range(ell)
                    ]
                )
        P = rand_polyvector(rng, rng.randint(-1, 1), ell, max_order=2)
        assert delta_K(K, delta_K(K, P)).is_zero()
        count += 1
    assert count >= 20


def test_inner_product_lemmas():
    """Derivative identity, symmetry, pairing invariance, and the Gram form."""
    rng = random.Random(1007)
    for trial in range(50):
        ell = rng.randint(1, 2)
        K = rand_poly_op(rng, ell) if trial % 2 else rand_quasiconstant_op(rng, ell)
        F = [rand_poly(rng, ell) for _ in range(ell)]
        G = [rand_poly(rng, ell) for _ in range(ell)]
        lhs = total_derivative(inner_product(K, F, G))
        KG = K.apply(G)
        KsF = K.adjoint().apply(F)
        rhs = DiffPoly()
        for i in range(ell):
            rhs = rhs + F[i] * KG[i] - G[i] * KsF[i]
        assert lhs == rhs

    for trial in range(50):
        ell = rng.randint(1, 2)
        K = rand_skew_op(rng, ell) if trial % 2 else rand_skew_quasiconstant(rng, ell)
        F = [rand_poly(rng, ell) for _ in range(ell)]
        G = [rand_poly(rng, ell) for _ in range(ell)]
        assert functional_equal(inner_product(K, F, G), inner_product(K, G, F))

    for _ in range(50):
        ell = rng.randint(1, 3)
        S = rand_symmetric_nondegenerate(rng, ell)
        K = _s_times_d(S)
        Sinv = _inverse(S)
        W = [[Fraction(0)] * ell for _ in range(ell)]
        for i in range(ell):
            for j in range(i + 1, ell):
                c = Fraction(rng.randint(-3, 3))
                W[i][j] = c
                W[j][i] = -c
        P = linalg.matmul(Sinv, W)
        # the defining identity: K P + P* K = 0 as operators
        Pop = MatDiffOp(
            [
                [({0: DiffPoly.const(P[i][j])} if P[i][j] else {}) for j in range(ell)]
                for i in range(ell)
            ]
        )
        assert (K.compose(Pop) + Pop.adjoint().compose(K)).is_zero()
        # invariance of the pairing on the kernel of K
        c = [Fraction(rng.randint(-3, 3)) for _ in range(ell)]
        d = [Fraction(rng.randint(-3, 3)) for _ in range(ell)]
        Pc = linalg.matvec(P, c)
        Pd = linalg.matvec(P, d)
        val = inner_product(
            K,
            [DiffPoly.const(x) for x in Pc],
            [DiffPoly.const(x) for x in d],
        ) + inner_product(
            K,
            [DiffPoly.const(x) for x in c],
            [DiffPoly.const(x) for x in Pd],
        )
        assert val.is_zero()

    for ell in (1, 2, 3):
        S = rand_symmetric_nondegenerate(rng, ell)
        basis, gram = gram_on_kernel(_s_times_d(S))
        assert gram == S


def test_essential_vanishing():
    """Every nonzero element of the explicit complement basis is inessential;
    every exact element is essentially closed."""
    rng = random.Random(1008)

    def b_element(ell, k, subset):
        raw = {}
        for idx in itertools.product(range(1, ell + 1), repeat=k + 1):
            s = _skew_value(subset, idx)
            if s:
                raw[idx] = LambdaPoly.const(k + 1, DiffPoly.const(s))
        return normalize(k, ell, raw)

    def w_element(ell, k, S, subset):
        Sinv = _inverse([[Fraction(x) for x in row] for row in S])
        raw = {}
        for idx in itertools.product(range(1, ell + 1), repeat=k + 1):
            poly = DiffPoly()
            for j in range(1, ell + 1):
                c = Fraction(0)
                for m in range(1, ell + 1):
                    w = _skew_value(subset, (m,) + idx)
                    if w:
                        c += Sinv[j - 1][m - 1] * w
                if c:
                    poly = poly + c * u(j)
            if poly:
                raw[idx] = LambdaPoly.const(k + 1, poly)
        return normalize(k, ell, raw)

    for ell in (1, 2, 3):
        for S in (_identity(ell), rand_symmetric_nondegenerate(rng, ell)):
            K = _s_times_d(S)
            # degree -1 part: nonzero functionals are never essential
            assert not is_essential(K, PolyVector.from_functional(_one(), ell))
            assert not is_essential(K, PolyVector.from_functional(u(1), ell))
            for k in range(0, ell):
                count = 0
                for subset in itertools.combinations(range(1, ell + 1), k + 1):
                    P = b_element(ell, k, subset)
                    assert not P.is_zero()
                    assert not is_essential(K, P)
                    count += 1
                for subset in itertools.combinations(range(1, ell + 1), k + 2):
                    P = w_element(ell, k, S, subset)
                    assert not P.is_zero()
                    assert a_space_member(K, P)
                    assert not is_essential(K, P)
                    count += 1
                assert count == comb(ell + 1, k + 2)
            for _ in range(4):
                p = rng.randint(-1, min(1, ell - 1))
                P = rand_polyvector(rng, p, ell, max_order=2)
                assert is_essential(K, delta_K(K, P))


def test_lenard_chain():
    """Four conserved functionals with exact recursion and involution."""
    start = time.monotonic()
    D = d_operator(1)
    kdv = _kdv_op()
    state = build_hierarchy(D, kdv, LocalFunctional(u(1)), 3)
    assert state.obstructed_at is None
    assert len(state.functionals) == 4
    for m in range(3):
        dnext = variational_derivative(state.functionals[m + 1].rep, 1)
        dcur = variational_derivative(state.functionals[m].rep, 1)
        assert D.apply(dnext) == kdv.apply(dcur)
    assert len(state.involution_K) == 4
    assert all(all(row) for row in state.involution_K)
    assert all(all(row) for row in state.involution_H)
    assert time.monotonic() - start < 30.0


def test_casimir_dimension_formula():
    """dim H^{-1} = 1 + ell - rank of the zero-order coefficient."""
    rng = random.Random(1010)
    count = 0
    while count < 10:
        ell = rng.randint(1, 2)
        K = rand_quasiconstant_op(rng, ell)
        if not K.leading_coefficient()[1]:
            continue
        K0 = K.constant_coefficient(0)
        expected = 1 + ell - linalg.rank(K0)
        assert len(casimir_basis(K)) == expected
        reports = cohomology_dimensions(K, -1)
        assert reports[0].k == -1 and reports[0].dim == expected
        count += 1
    assert count >= 10


def _rand_expr_text(rng):
    """Random text conforming to the expression grammar."""

    def rational():
        num = rng.randint(0, 9)
        if rng.random() < 0.4:
            return "%d/%d" % (num, rng.randint(1, 9))
        return str(num)

    def var():
        i = rng.randint(1, 3)
        n = rng.randint(0, 5)
        if n <= 3 and rng.random() < 0.7:
            return "u%d%s" % (i, "'" * n)
        return "u%d_%d" % (i, n)

    def atom(depth):
        roll = rng.random()
        if roll < 0.35:
            return rational()
        if roll < 0.8 or depth >= 2:
            return var()
        return "(" + expr(depth + 1) + ")"

    def factor(depth):
        text = atom(depth)
        if rng.random() < 0.3:
            text += "^%d" % rng.randint(0, 3)
        return text

    def term(depth):
        parts = [factor(depth) for _ in range(rng.randint(1, 3))]
        return "*".join(parts)

    def expr(depth):
        parts = [term(depth)]
        for _ in range(rng.randint(0, 2)):
            parts.append(rng.choice(["+", "-"]))
            parts.append(term(depth))
        text = " ".join(parts)
        if depth == 0 and rng.random() < 0.2:
            text = "-" + text
        return text

    return expr(0)


def test_parser_round_trip_and_determinism(tmp_path):
    """1000 expression round trips plus byte-identical reports."""
    rng = random.Random(1011)
    for _ in range(500):
        ell = rng.randint(1, 3)
        p = rand_poly(rng, ell, max_order=4, max_degree=3, terms=4)
        assert parse_expr(print_expr(p)) == p
    for _ in range(500):
        text = _rand_expr_text(rng)
        printed = print_expr(parse_expr(text))
        assert print_expr(parse_expr(printed)) == printed

    kdv_doc = tmp_path / "kdv.op"
    kdv_doc.write_text(
        json.dumps(
            {
                "name": "kdv",
                "description": "third-order scalar operator",
                "ell": 1,
                "entries": [["D^3 + 2*u1*D + u1'"]],
            }
        )
    )
    d_doc = tmp_path / "d.op"
    d_doc.write_text(
        json.dumps({"name": "d", "description": "derivative", "ell": 1, "entries": [["D"]]})
    )
    d3_doc = tmp_path / "d3.op"
    d3_doc.write_text(
        json.dumps(
            {"name": "d3", "description": "third derivative", "ell": 1, "entries": [["D^3"]]}
        )
    )
    commands = [
        ["cohomology", "--K", str(d3_doc), "--kmax", "1"],
        ["lenard", "--K", str(d_doc), "--H", str(kdv_doc), "--seed", "u1", "--steps", "3"],
        ["casimirs", "--K", str(d_doc)],
    ]
    for argv in commands:
        runs = []
        for _ in range(2):
            proc = subprocess.run(
                [sys.executable, "-m", "varpoisson.cli"] + argv,
                capture_output=True,
                check=True,
            )
            runs.append(proc.stdout)
        assert runs[0] == runs[1]
        assert runs[0]
