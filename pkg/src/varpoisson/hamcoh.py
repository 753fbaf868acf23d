"""Cohomology of the polyvector complex for quasiconstant operators.

For a quasiconstant operator K the adjoint action extends to a differential
delta_K on the whole complex (squaring to zero even when K is not
skewadjoint).  The cohomology in each degree is computed through a finite
linear-algebra reduction: constant skew arrays of lambda-degree below the
order N of K are coordinatized by subsets of composite symbols (index,
exponent), and a linear endomorphism alpha_k on that space is defined by
dividing (lambda_0+...+lambda_k)P by K in the array sense.  The kernel
dimensions of alpha_k and alpha_{k+1} add up to the k-th cohomology
dimension, bounded by binomial(N*ell+1, k+2), with equality exactly for
first-order operators S*d with S invertible.

Also provided: Casimir functionals, the A-space membership test (u-linear
arrays with constant coefficient polynomials satisfying the closedness
divisibility condition), the essential-element test by nested brackets with
Casimirs, and the inner product associated to K together with its Gram
matrix on the kernel.
"""

from __future__ import annotations

import itertools
from collections import namedtuple
from fractions import Fraction
from math import comb

from . import linalg
from .diffpoly import (
    DiffPoly,
    LocalFunctional,
    functional_equal,
    total_derivative,
    u,
    variational_derivative,
)
from .matop import MatDiffOp
from .polyvec import (
    LambdaPoly,
    PolyVector,
    bracket_k_functional,
    eliminate_last_slot,
    normalize,
    triple_bracket,
)

CohomologyReport = namedtuple(
    "CohomologyReport", ["k", "ker_dim", "dim", "bound", "attained"]
)

AlphaMap = namedtuple("AlphaMap", ["coords", "qcoords", "matrix", "certificates"])


def _perm_sign(perm):
    sign = 1
    for a in range(len(perm)):
        for b in range(a + 1, len(perm)):
            if perm[a] > perm[b]:
                sign = -sign
    return sign


def _require_quasiconstant(K):
    if K.rows != K.cols:
        raise ValueError("operator must be square")
    if not K.is_quasiconstant():
        raise ValueError("operator must have constant coefficients")


def is_hamiltonian(K):
    """True iff K is skewadjoint with vanishing self-bracket."""
    if K.rows != K.cols:
        raise ValueError("operator must be square")
    if not K.is_skewadjoint():
        return False
    return triple_bracket(K, K).is_zero()


def is_compatible(K, H):
    """True iff K and H are each Hamiltonian and their bracket vanishes."""
    if not (is_hamiltonian(K) and is_hamiltonian(H)):
        return False
    return triple_bracket(K, H).is_zero()


def delta_K(K, P):
    """The differential of P: each entry of P loses one index position,
    is differentiated in u_j^(n), and is contracted with lambda_a^n times
    the K entry at the restored position, with alternating signs."""
    _require_quasiconstant(K)
    ell = K.rows
    if P.ell != ell:
        raise ValueError("polyvector and operator sizes differ")
    if P.degree < -1:
        return PolyVector(-1, ell)
    k = P.degree + 1
    raw = {}
    outsign = -1 if (k + 1) % 2 else 1
    for idx in itertools.product(range(1, ell + 1), repeat=k + 1):
        acc = LambdaPoly.zero(k + 1)
        for alpha in range(k + 1):
            pos = [t for t in range(k + 1) if t != alpha]
            pent = P.entry(tuple(idx[t] for t in pos))
            if not pent:
                continue
            emb = pent.embed(k + 1, pos[: max(P.degree, 0)])
            for j in range(1, ell + 1):
                kent = K.entry(j, idx[alpha])
                if not kent:
                    continue
                for n in range(emb.max_coeff_order() + 1):
                    W = emb.partial(j, n)
                    if not W:
                        continue
                    for m, c in kent.items():
                        shift = [0] * (k + 1)
                        shift[alpha] = m + n
                        term = W.coeff_mul(c).shift_exps(tuple(shift))
                        if alpha % 2:
                            term = -term
                        acc = acc + term
        if acc:
            raw[idx] = acc if outsign > 0 else -acc
    return normalize(k, ell, raw)


def casimir_basis(K):
    """Basis of the u-linear Casimir functionals of a quasiconstant K.

    Returns the constant functional followed by one functional u . A for
    each basis vector A of the kernel of the zero-order coefficient of K.
    For K = S d with S invertible this is a complete list of Casimirs.
    """
    _require_quasiconstant(K)
    ell = K.rows
    K0 = K.constant_coefficient(0)
    out = [LocalFunctional(DiffPoly.const(1))]
    for vec in linalg.nullspace(K0):
        rep = DiffPoly()
        for i, c in enumerate(vec):
            rep = rep + c * u(i + 1)
        out.append(LocalFunctional(rep))
    return out


class SkewArrayCoords:
    """Subset coordinates on constant skew arrays.

    Arrays P_{i_0..i_k}(lambda_0..lambda_k) with constant coefficients,
    degree below `order` in each variable, skew under simultaneous
    permutations, form a space of dimension binomial(order*ell, k+1);
    a basis is indexed by (k+1)-subsets of the composite symbols (i, e)
    with e < order, ordered by (e, i).
    """

    def __init__(self, ell, order, k):
        self.ell = ell
        self.order = order
        self.k = k
        self.symbols = [(i, e) for e in range(order) for i in range(1, ell + 1)]
        self.subsets = list(itertools.combinations(range(len(self.symbols)), k + 1))

    def dim(self):
        return len(self.subsets)

    def basis_entry(self, subset, idx):
        """Lambda-monomial coefficients of a subset basis array at idx."""
        syms = [self.symbols[s] for s in subset]
        out = {}
        for sigma in itertools.permutations(range(len(syms))):
            if any(syms[sigma[t]][0] != idx[t] for t in range(len(idx))):
                continue
            e = tuple(syms[sigma[t]][1] for t in range(len(idx)))
            out[e] = out.get(e, 0) + _perm_sign(sigma)
        return {e: c for e, c in out.items() if c}

    def to_polyvector(self, coeffs):
        """The polyvector with entries sum of coeffs[c] times basis arrays."""
        ell, k = self.ell, self.k
        raw = {}
        for idx in itertools.product(range(1, ell + 1), repeat=k + 1):
            terms = {}
            for c, q in zip(self.subsets, coeffs):
                if not q:
                    continue
                for e, s in self.basis_entry(c, idx).items():
                    v = terms.get(e, Fraction(0)) + q * s
                    if v:
                        terms[e] = v
                    elif e in terms:
                        del terms[e]
            if terms:
                raw[idx] = LambdaPoly(
                    k + 1, {e: DiffPoly.const(c) for e, c in terms.items()}
                )
        return normalize(k, ell, raw)


def _k_coeff_matrices(K):
    N = K.order()
    mats = []
    for n in range(N + 1):
        mats.append(K.constant_coefficient(n))
    return mats


def alpha_map(K, k):
    """Matrix of alpha_k on the subset basis, with division certificates.

    For each basis array P there are unique R (in the same space) and Q
    (constant arrays with one free index and k skew symbol slots) with
    (lambda_0+...+lambda_k) P = R + sum_a (-1)^a sum_j Q_{j,..a..} K_{j,i_a}(lambda_a);
    the map sends P to R.  Returns the coordinates, the Q coordinates, the
    matrix (columns indexed like coords.subsets), and per-column Q
    coefficient vectors.
    """
    _require_quasiconstant(K)
    ell = K.rows
    N = K.order()
    if N < 0:
        raise ValueError("leading coefficient not invertible")
    lead, invertible = K.leading_coefficient()
    if not invertible:
        raise ValueError("leading coefficient not invertible")
    kc = _k_coeff_matrices(K)
    coords = SkewArrayCoords(ell, N, k)
    qcoords = SkewArrayCoords(ell, N, k - 1)
    nr = coords.dim()
    qlist = [(j, c) for j in range(1, ell + 1) for c in qcoords.subsets]
    nq = len(qlist)

    # equations are indexed by (sorted index tuple, lambda exponent tuple
    # with entries up to N); build the coefficient matrix once
    tuples = list(itertools.combinations_with_replacement(range(1, ell + 1), k + 1))
    monos = list(itertools.product(range(N + 1), repeat=k + 1))
    eq_index = {}
    for I in tuples:
        for e in monos:
            eq_index[(I, e)] = len(eq_index)
    neq = len(eq_index)

    M = [[Fraction(0)] * (nr + nq) for _ in range(neq)]
    for col, subset in enumerate(coords.subsets):
        for I in tuples:
            for e, c in coords.basis_entry(subset, I).items():
                M[eq_index[(I, e)]][col] += c
    for qcol, (j, qsub) in enumerate(qlist):
        col = nr + qcol
        for I in tuples:
            for alpha in range(k + 1):
                sub_idx = I[:alpha] + I[alpha + 1 :]
                vals = qcoords.basis_entry(qsub, sub_idx)
                if not vals:
                    continue
                sign = -1 if alpha % 2 else 1
                for m in range(N + 1):
                    kval = kc[m][j - 1][I[alpha] - 1]
                    if not kval:
                        continue
                    for f, c in vals.items():
                        e = list(f[:alpha]) + [m] + list(f[alpha:])
                        M[eq_index[(I, tuple(e))]][col] += sign * kval * c

    matrix = [[Fraction(0)] * nr for _ in range(nr)]
    certificates = []
    for col, subset in enumerate(coords.subsets):
        b = [Fraction(0)] * neq
        for I in tuples:
            vals = coords.basis_entry(subset, I)
            for e, c in vals.items():
                for t in range(k + 1):
                    lifted = list(e)
                    lifted[t] += 1
                    b[eq_index[(I, tuple(lifted))]] += c
        sol = linalg.solve(M, b)
        if sol is None:
            raise ValueError("array division by the operator failed")
        for r in range(nr):
            matrix[r][col] = sol[r]
        certificates.append(sol[nr:])
    return AlphaMap(coords, qcoords, matrix, certificates)


def cohomology_dimensions(K, kmax):
    """Cohomology dimensions for degrees -1..kmax with their upper bounds.

    The degree -1 dimension is 1 plus the kernel dimension of alpha_0; for
    k >= 0 it is the sum of the kernel dimensions of alpha_k and
    alpha_{k+1}.  The bound binomial(N*ell+1, k+2) is attained for every k
    exactly when K = S d with S invertible.
    """
    _require_quasiconstant(K)
    ell = K.rows
    N = K.order()
    if N < 0:
        raise ValueError("leading coefficient not invertible")
    nl = N * ell
    kers = {}
    for k in range(0, kmax + 2):
        if k + 1 > nl:
            kers[k] = 0
            continue
        amap = alpha_map(K, k)
        kers[k] = amap.coords.dim() - linalg.rank(amap.matrix)
    out = []
    for k in range(-1, kmax + 1):
        if k == -1:
            dim = 1 + kers[0]
            ker = kers[0]
        else:
            dim = kers[k] + kers[k + 1]
            ker = kers[k]
        bound = comb(nl + 1, k + 2)
        out.append(CohomologyReport(k, ker, dim, bound, dim == bound))
    return out


def sigma_space(K, k):
    """Basis of the space parametrizing the kernel of alpha_k, k in {0,1}.

    Degree 0: constant vectors killed by the transpose of the zero-order
    coefficient.  Degree 1: matrix polynomials Q of degree below the order
    of K with K^T(-lambda) Q(lambda) = Q^T(-lambda) K(lambda); each basis
    element is returned as the list of its matrix coefficients.
    """
    _require_quasiconstant(K)
    ell = K.rows
    N = K.order()
    if k == 0:
        K0 = K.constant_coefficient(0)
        return linalg.nullspace(linalg.transpose(K0))
    if k != 1:
        raise ValueError("only degrees 0 and 1 are supported")
    kc = _k_coeff_matrices(K)
    if N == 0:
        return []
    nunk = N * ell * ell

    def unk(n, a, b):
        return (n * ell + a) * ell + b

    rows = []
    for p in range(2 * N):
        for i in range(ell):
            for j in range(ell):
                row = [Fraction(0)] * nunk
                for m in range(N + 1):
                    n = p - m
                    if not 0 <= n <= N - 1:
                        continue
                    msign = -1 if m % 2 else 1
                    nsign = -1 if n % 2 else 1
                    for a in range(ell):
                        # ((-1)^m K_m^T Q_n)_{ij}
                        row[unk(n, a, j)] += msign * kc[m][a][i]
                        # -((-1)^n Q_n^T K_m)_{ij}
                        row[unk(n, a, i)] -= nsign * kc[m][a][j]
                if any(row):
                    rows.append(row)
    if not rows:
        rows = [[Fraction(0)] * nunk]
    basis = []
    for vec in linalg.nullspace(rows, nunk):
        mats = []
        for n in range(N):
            mats.append(
                [
                    [vec[unk(n, a, b)] for b in range(ell)]
                    for a in range(ell)
                ]
            )
        basis.append(mats)
    return basis


def _linear_rep(exps, j, k):
    """Normalized representative of the array monomial lambda^exps u_j."""
    return eliminate_last_slot(
        LambdaPoly(k + 1, {tuple(exps): u(j)})
    )


def a_space_member(K, P):
    """Membership of a polyvector in the space of u-linear constant arrays.

    The entries must be classes of sums over j of c_{j,E} lambda^E u_j with
    constant c (recovered by an exact linear solve; failure raises
    ValueError).  Membership then requires degree below the order of K in
    every variable, skewness of the recovered array under simultaneous
    permutations of the index-and-variable pairs (the free index j is not
    permuted), and the contraction with K to be divisible by the sum of
    the variables.
    """
    _require_quasiconstant(K)
    ell = K.rows
    N = K.order()
    k = P.degree
    if k < -1:
        return True
    if P.ell != ell:
        raise ValueError("polyvector and operator sizes differ")
    kc = _k_coeff_matrices(K)

    if k == -1:
        rep = P.entry(()).terms.get((), DiffPoly())
        delta = variational_derivative(rep, ell)
        coeffs = []
        for d in delta:
            if not d.is_constant():
                raise ValueError("entries are not linear in the variables")
            coeffs.append(d.constant_term())
        recon = DiffPoly()
        for j, c in enumerate(coeffs):
            recon = recon + c * u(j + 1)
        if not functional_equal(rep, recon):
            raise ValueError("entries are not linear in the variables")
        # the divisibility condition reduces to the transpose of the
        # zero-order coefficient killing the constant vector
        prod = linalg.matvec(linalg.transpose(kc[0]), coeffs)
        return all(x == 0 for x in prod)

    # recover the constant array: unknowns c_{j,E} with E bounded by the
    # observed slot degrees and coefficient orders of the entries
    d = P.max_slot_degree()
    r = P.max_coeff_order()
    if r < 0:
        r = 0
    exp_ranges = [range(d + 1)] * k + [range(r + 1)]
    errors = "entries are not linear in the variables"
    array = {}
    for idx in itertools.product(range(1, ell + 1), repeat=k + 1):
        target = P.entry(idx)
        unknowns = []
        reps = []
        for j in range(1, ell + 1):
            for E in itertools.product(*exp_ranges):
                rep = _linear_rep(E, j, k)
                if rep:
                    unknowns.append((j, E))
                    reps.append(rep)
        keys = set()
        for rep in reps:
            for e, c in rep.terms.items():
                for mon in c.terms:
                    keys.add((e, mon))
        for e, c in target.terms.items():
            for mon in c.terms:
                keys.add((e, mon))
        keys = sorted(keys)
        key_index = {key: t for t, key in enumerate(keys)}
        M = [[Fraction(0)] * len(unknowns) for _ in keys]
        for col, rep in enumerate(reps):
            for e, c in rep.terms.items():
                for mon, q in c.terms.items():
                    M[key_index[(e, mon)]][col] += q
        b = [Fraction(0)] * len(keys)
        for e, c in target.terms.items():
            for mon, q in c.terms.items():
                b[key_index[(e, mon)]] += q
        sol = linalg.solve(M, b) if keys else []
        if sol is None:
            raise ValueError(errors)
        for (j, E), val in zip(unknowns, sol):
            if val:
                array[(j,) + idx] = array.get((j,) + idx, {})
                array[(j,) + idx][E] = val

    # degree below the order of K in every variable
    for vals in array.values():
        for E in vals:
            if any(e > N - 1 for e in E):
                return False

    # skewness in the k+1 trailing indices together with the variables
    for full_idx, vals in array.items():
        j, idx = full_idx[0], full_idx[1:]
        for t in range(k):
            sw = list(idx)
            sw[t], sw[t + 1] = sw[t + 1], sw[t]
            other = array.get((j,) + tuple(sw), {})
            for E, val in vals.items():
                f = list(E)
                f[t], f[t + 1] = f[t + 1], f[t]
                if other.get(tuple(f), Fraction(0)) != -val:
                    return False

    # contraction with K divisible by the sum of the variables
    for idx in itertools.product(range(1, ell + 1), repeat=k + 2):
        acc = {}
        for alpha in range(k + 2):
            sub = idx[:alpha] + idx[alpha + 1 :]
            sign = -1 if alpha % 2 else 1
            for j in range(1, ell + 1):
                vals = array.get((j,) + sub)
                if not vals:
                    continue
                for m in range(N + 1):
                    kval = kc[m][j - 1][idx[alpha] - 1]
                    if not kval:
                        continue
                    for E, val in vals.items():
                        e = list(E[:alpha]) + [m] + list(E[alpha:])
                        key = tuple(e)
                        s = acc.get(key, Fraction(0)) + sign * kval * val
                        if s:
                            acc[key] = s
                        elif key in acc:
                            del acc[key]
        if acc:
            lp = LambdaPoly(k + 2, {e: DiffPoly.const(c) for e, c in acc.items()})
            if eliminate_last_slot(lp):
                return False
    return True


def is_essential(K, P):
    """All nested brackets with Casimir functionals vanish.

    Tests (degree+1)-fold nested brackets against the u-linear Casimir
    basis; for degree -1 only the zero class is essential.
    """
    cas = casimir_basis(K)
    if P.degree < 0:
        return P.is_zero()
    current = [P]
    for _ in range(P.degree + 1):
        nxt = []
        for X in current:
            if X.is_zero():
                continue
            for C in cas:
                nxt.append(bracket_k_functional(X, C.rep))
        current = nxt
    return all(X.is_zero() for X in current)


def inner_product(K, F, G):
    """The pairing whose total derivative is F . K(d)G - G . K*(d)F.

    Expands each operator entry sum_n K_{ij;n} d^n and sums
    binom(n,m) (-d)^{n-1-m}(F_i K_{ij;n} d^m G_j) over m < n.
    """
    if K.rows != K.cols:
        raise ValueError("operator must be square")
    ell = K.rows
    F = [DiffPoly._coerce(x) for x in F]
    G = [DiffPoly._coerce(x) for x in G]
    if len(F) != ell or len(G) != ell:
        raise ValueError("vector length must match the operator size")
    acc = DiffPoly()
    for i in range(ell):
        for j in range(ell):
            ent = K.entry(i + 1, j + 1)
            for n, c in ent.items():
                for m in range(n):
                    inner = F[i] * c * total_derivative(G[j], m)
                    term = total_derivative(inner, n - 1 - m)
                    if (n - 1 - m) % 2:
                        term = -term
                    acc = acc + comb(n, m) * term
    return acc


def gram_on_kernel(K):
    """Kernel basis of a skewadjoint quasiconstant K and its Gram matrix.

    The kernel of K on constant vectors is the nullspace of the zero-order
    coefficient; the inner product restricted there takes constant values
    and is symmetric.  Returns (basis, gram).
    """
    _require_quasiconstant(K)
    if not K.is_skewadjoint():
        raise ValueError("operator must be skewadjoint")
    ell = K.rows
    K0 = K.constant_coefficient(0)
    basis = linalg.nullspace(K0)
    gram = []
    for a in basis:
        row = []
        Fa = [DiffPoly.const(x) for x in a]
        for b in basis:
            Gb = [DiffPoly.const(x) for x in b]
            val = inner_product(K, Fa, Gb)
            if not val.is_constant():
                raise ValueError("inner product is not constant on the kernel")
            row.append(val.constant_term())
        gram.append(row)
    return basis, gram
