"""Grassmann algebra, Poisson superbracket, prolongations, embeddings."""

import itertools
import random
from fractions import Fraction
from math import comb

from varpoisson.superlie import (
    GrassmannElem,
    HtildeElem,
    SuperDerivation,
    full_prolongation,
    grassmann_mul,
    htilde_bracket,
    htilde_dims,
    iso_check_translation_case,
    phi_S_embed,
    poisson_bracket_S,
    so_basis,
    vA_map_bijective,
)


def _rand_grassmann(rng, n, parity=None):
    g = GrassmannElem.zero(n)
    for _ in range(4):
        size = rng.randint(0, n)
        if parity is not None:
            while size % 2 != parity:
                size = rng.randint(0, n)
        word = tuple(sorted(rng.sample(range(1, n + 1), size)))
        g = g + GrassmannElem(n, {word: Fraction(rng.randint(-3, 3))})
    return g


def _rand_derivation(rng, n, parity):
    coeffs = {}
    for j in range(1, n + 1):
        if rng.random() < 0.7:
            coeffs[j] = _rand_grassmann(rng, n, (parity + 1) % 2)
    return SuperDerivation(n, coeffs)


def _identity(n):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def _gl_basis(n):
    out = []
    for i in range(n):
        for j in range(n):
            M = [[Fraction(0)] * n for _ in range(n)]
            M[i][j] = Fraction(1)
            out.append(M)
    return out


def test_generators_square_to_zero_and_anticommute():
    n = 3
    for i in range(1, n + 1):
        xi = GrassmannElem.xi(n, i)
        assert grassmann_mul(xi, xi).is_zero()
    a = GrassmannElem.xi(n, 1)
    b = GrassmannElem.xi(n, 2)
    assert grassmann_mul(a, b) == -grassmann_mul(b, a)
    # building a word from an out-of-order index list tracks the sign
    assert GrassmannElem.word(n, (2, 1)) == -GrassmannElem.word(n, (1, 2))


def test_multiplication_is_associative():
    rng = random.Random(9)
    for _ in range(10):
        a = _rand_grassmann(rng, 4)
        b = _rand_grassmann(rng, 4)
        c = _rand_grassmann(rng, 4)
        assert grassmann_mul(grassmann_mul(a, b), c) == grassmann_mul(
            a, grassmann_mul(b, c)
        )


def test_left_partial_anticommutes_to_the_front():
    n = 3
    w = grassmann_mul(GrassmannElem.xi(n, 1), GrassmannElem.xi(n, 2))
    assert w.left_partial(2) == -GrassmannElem.xi(n, 1)
    assert w.left_partial(1) == GrassmannElem.xi(n, 2)
    assert w.left_partial(3).is_zero()


def test_poisson_bracket_on_generators_returns_the_matrix():
    n = 3
    S = [[1, 2, 0], [2, 0, 1], [0, 1, 3]]
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            b = poisson_bracket_S(S, GrassmannElem.xi(n, i), GrassmannElem.xi(n, j))
            assert b == GrassmannElem.scalar(n, Fraction(S[i - 1][j - 1]))


def test_poisson_bracket_skew_jacobi_leibniz():
    rng = random.Random(29)
    n = 4
    S = [[1, 0, 2, 0], [0, 2, 0, 1], [2, 0, 0, 0], [0, 1, 0, 1]]
    for _ in range(12):
        pf, pg = rng.randint(0, 1), rng.randint(0, 1)
        f = _rand_grassmann(rng, n, pf)
        g = _rand_grassmann(rng, n, pg)
        h = _rand_grassmann(rng, n, rng.randint(0, 1))
        sgn = (-1) ** (pf * pg)
        assert poisson_bracket_S(S, f, g) == poisson_bracket_S(S, g, f).scale(-sgn)
        lhs = poisson_bracket_S(S, f, grassmann_mul(g, h))
        rhs = grassmann_mul(poisson_bracket_S(S, f, g), h) + grassmann_mul(
            g, poisson_bracket_S(S, f, h)
        ).scale(sgn)
        assert lhs == rhs
    for _ in range(12):
        pf, pg, ph = rng.randint(0, 1), rng.randint(0, 1), rng.randint(0, 1)
        f = _rand_grassmann(rng, n, pf)
        g = _rand_grassmann(rng, n, pg)
        h = _rand_grassmann(rng, n, ph)
        a = poisson_bracket_S(S, f, poisson_bracket_S(S, g, h))
        b = poisson_bracket_S(S, poisson_bracket_S(S, f, g), h)
        c = poisson_bracket_S(S, g, poisson_bracket_S(S, f, h)).scale(
            (-1) ** (pf * pg)
        )
        assert a == b + c


def test_quotient_strips_scalars():
    n = 2
    S = _identity(n)
    # bracket of two generators is a scalar, hence zero in the quotient
    out = htilde_bracket(S, GrassmannElem.xi(n, 1), GrassmannElem.xi(n, 1))
    assert out.is_zero()
    assert HtildeElem(GrassmannElem.scalar(n, 5)).is_zero()


def test_htilde_dims_are_binomials():
    for n in range(1, 7):
        S = _identity(n)
        dims = htilde_dims(n, S)
        assert dims == tuple(comb(n, k + 2) for k in range(-1, n - 1))
        assert sum(dims) == 2**n - 1
    try:
        htilde_dims(2, [[1, 2], [3, 4]])
        assert False, "expected ValueError"
    except ValueError:
        pass
    try:
        htilde_dims(3, [[1]])
        assert False, "expected ValueError"
    except ValueError:
        pass


def test_so_basis_solves_the_defining_equations():
    cases = [
        (2, _identity(2), 1),
        (3, _identity(3), 3),
        (3, [[1, 0, 0], [0, 2, 0], [0, 0, 3]], 3),
        (3, [[1, 0, 0], [0, 1, 0], [0, 0, 0]], 3),
        (3, [[1, 0, 0], [0, 0, 0], [0, 0, 0]], 5),
        (4, _identity(4), 6),
    ]
    for n, S, dim in cases:
        basis = so_basis(n, S)
        assert len(basis) == dim
        for A in basis:
            assert sum(A[i][i] for i in range(n)) == 0
            for i in range(n):
                for j in range(n):
                    val = sum(A[m][i] * Fraction(S[m][j]) + Fraction(S[i][m]) * A[m][j] for m in range(n))
                    assert val == 0


def test_vA_map_bijective_tracks_the_rank():
    assert vA_map_bijective(2, _identity(2))
    assert vA_map_bijective(3, _identity(3))
    assert vA_map_bijective(3, [[1, 0, 0], [0, 1, 0], [0, 0, 0]])
    assert not vA_map_bijective(3, [[1, 0, 0], [0, 0, 0], [0, 0, 0]])


def test_phi_embedding_is_an_injective_homomorphism():
    rng = random.Random(39)
    n = 4
    S = [[0, 0, 0, 0], [0, 1, 0, 0], [0, 0, 2, 0], [0, 0, 0, 1]]
    phi = phi_S_embed(n, S)
    for size in range(1, n + 1):
        for word in itertools.combinations(range(1, n + 1), size):
            img = phi(HtildeElem(GrassmannElem(n, {word: Fraction(1)})))
            assert not img.is_zero()
    for _ in range(10):
        pf, pg = rng.randint(0, 1), rng.randint(0, 1)
        f = _rand_grassmann(rng, n, pf)
        g = _rand_grassmann(rng, n, pg)
        lhs = phi(htilde_bracket(S, f, g))
        rhs = phi(HtildeElem(f)).bracket(phi(HtildeElem(g)))
        assert lhs == rhs
    try:
        phi_S_embed(2, _identity(2))
        assert False, "expected ValueError"
    except ValueError:
        pass


def test_derivation_bracket_acts_as_the_supercommutator():
    rng = random.Random(49)
    n = 4
    for _ in range(10):
        px, py = rng.randint(0, 1), rng.randint(0, 1)
        X = _rand_derivation(rng, n, px)
        Y = _rand_derivation(rng, n, py)
        g = _rand_grassmann(rng, n, rng.randint(0, 1))
        lhs = X.bracket(Y).apply(g)
        rhs = X.apply(Y.apply(g)) - Y.apply(X.apply(g)).scale((-1) ** (px * py))
        assert lhs == rhs


def test_prolongation_of_the_orthogonal_pair_is_binomial():
    for n, S in ((2, _identity(2)), (3, _identity(3)), (3, [[1, 0, 0], [0, 1, 0], [0, 0, 0]])):
        g = so_basis(n, S)
        for k in range(-1, n):
            dim, basis = full_prolongation(n, g, k)
            assert dim == comb(n, k + 2)
            assert len(basis) == dim


def test_prolongation_of_the_general_linear_pair_is_the_full_algebra():
    n = 3
    for k in range(-1, n + 1):
        dim, basis = full_prolongation(n, _gl_basis(n), k)
        assert dim == n * comb(n, k + 1)


def test_prolongation_rejects_unfaithful_actions():
    z = [[Fraction(0)] * 2 for _ in range(2)]
    try:
        full_prolongation(2, [z], 0)
        assert False, "expected ValueError"
    except ValueError:
        pass


def test_iso_check_smallest_case_and_degenerate_rejection():
    assert iso_check_translation_case(1, [[1]])
    try:
        iso_check_translation_case(2, [[1, 0], [0, 0]])
        assert False, "expected ValueError"
    except ValueError:
        pass
