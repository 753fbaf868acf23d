"""Lenard recursion for a compatible pair of Hamiltonian operators.

Starting from a functional in the kernel of the first operator, each step
solves K(d) G = H(d) (delta h / delta u) for a characteristic G and
integrates it back to a functional.  All functionals produced this way are
pairwise in involution with respect to both operators, and consecutive
ones satisfy the exact recursion K delta h_{m+1} = H delta h_m.
"""

from collections import namedtuple
from fractions import Fraction

from .diffpoly import (
    DiffPoly,
    LocalFunctional,
    _mon_degree,
    _monomials_of_degree,
    antiderivative,
    functional_equal,
    homotopy_integrate,
    variational_derivative,
)
from .hamcoh import is_compatible
from . import linalg


HierarchyState = namedtuple(
    "HierarchyState",
    [
        "K",
        "H",
        "functionals",
        "characteristics",
        "obstructed_at",
        "involution_H",
        "involution_K",
    ],
)
HierarchyState.__doc__ = """Result of running the recursion.

functionals holds the produced h_0 .. h_n, characteristics the flows
H(d) delta h_m / delta u.  obstructed_at is None when every requested
step succeeded, else the index of the first functional that could not
be produced.  The involution fields are boolean matrices over all pairs
of produced functionals, one per operator.
"""


def _coerce_functional(h):
    if isinstance(h, LocalFunctional):
        return h
    return LocalFunctional(h)


def _require_skewadjoint(H, name):
    if H.rows != H.cols:
        raise ValueError(f"{name} must be square")
    if not H.is_skewadjoint():
        raise ValueError(f"{name} is not skewadjoint")


def evolution_equation(H, h):
    """Right-hand side of the flow du/dt generated by the functional h.

    Returns the tuple H(d) delta h / delta u with one component per
    dependent variable.
    """
    _require_skewadjoint(H, "operator")
    h = _coerce_functional(h)
    return tuple(H.apply(variational_derivative(h.rep, H.rows)))


def involution_check(H, f, g):
    """True iff the bracket of the two functionals induced by H vanishes.

    The bracket is the functional of (delta g / delta u) . H(d)
    (delta f / delta u); vanishing is decided exactly in the quotient by
    total derivatives.
    """
    _require_skewadjoint(H, "operator")
    f = _coerce_functional(f)
    g = _coerce_functional(g)
    flow = H.apply(variational_derivative(f.rep, H.rows))
    dg = variational_derivative(g.rep, H.rows)
    integrand = sum((a * b for a, b in zip(dg, flow)), DiffPoly())
    return functional_equal(integrand, DiffPoly.zero())


def _inverse(S):
    n = len(S)
    aug = [list(row) + [Fraction(1 if i == j else 0) for j in range(n)]
           for i, row in enumerate(S)]
    red = linalg.rref(aug)[0]
    return [r[n:] for r in red]


def _solve_operator_equation(K, F):
    """A vector G with K(d) G = F, or None when there is none.

    K must be quasiconstant with an invertible leading coefficient.  When
    K is a constant matrix times d the solution is an antiderivative in
    disguise; otherwise the components of G are searched in the exact
    monomial space bounded by the degree of F and by its order plus the
    order of K (a constant-coefficient operator preserves degree and
    raises order by at most its own).
    """
    ell = K.rows
    if all(f.is_zero() for f in F):
        return [DiffPoly.zero() for _ in range(ell)]
    powers = {m for row in K.entries for e in row for m in e}
    if powers <= {1} and linalg.is_invertible(K.constant_coefficient(1)):
        Sinv = _inverse(K.constant_coefficient(1))
        G = []
        for i in range(ell):
            rhs = sum(
                (Sinv[i][j] * F[j] for j in range(ell) if Sinv[i][j]), DiffPoly()
            )
            g = antiderivative(rhs)
            if g is None:
                return None
            G.append(g)
        return G
    indices = list(range(1, ell + 1))
    max_n = max(f.max_order() for f in F) + max(K.order(), 0)
    variables = [(i, n) for n in range(max_n + 1) for i in indices]
    by_degree = {}
    for comp, f in enumerate(F):
        for mon, c in f.terms.items():
            by_degree.setdefault(_mon_degree(mon), {})[(comp, mon)] = c
    G = [DiffPoly() for _ in range(ell)]
    for degree, part in sorted(by_degree.items()):
        candidates = [
            (j, mon)
            for j in range(ell)
            for mon in _monomials_of_degree(variables, degree)
        ]
        columns = []
        for j, mon in candidates:
            probe = [DiffPoly() for _ in range(ell)]
            probe[j] = DiffPoly({mon: Fraction(1)})
            columns.append(K.apply(probe))
        row_index = {}
        for col in columns:
            for comp, poly in enumerate(col):
                for mon in poly.terms:
                    row_index.setdefault((comp, mon), len(row_index))
        for key in part:
            row_index.setdefault(key, len(row_index))
        matrix = [[Fraction(0)] * len(candidates) for _ in range(len(row_index))]
        for jcol, col in enumerate(columns):
            for comp, poly in enumerate(col):
                for mon, c in poly.terms.items():
                    matrix[row_index[(comp, mon)]][jcol] = c
        rhs = [Fraction(0)] * len(row_index)
        for key, c in part.items():
            rhs[row_index[key]] = c
        x = linalg.solve(matrix, rhs)
        if x is None:
            return None
        for (j, mon), c in zip(candidates, x):
            if c:
                G[j] = G[j] + DiffPoly({mon: c})
    return G


def lenard_step(K, H, h):
    """Next functional of the recursion, or None at an obstruction.

    Computes the flow F = H(d) delta h / delta u, solves K(d) G = F, and
    integrates G back to a functional by the scaling homotopy.  A None
    from either the solve or the integration means the recursion cannot
    be continued from this representative; malformed or incompatible
    operators raise instead.
    """
    _require_skewadjoint(K, "first operator")
    _require_skewadjoint(H, "second operator")
    if K.rows != H.rows:
        raise ValueError("operators act on different numbers of variables")
    if not K.is_quasiconstant():
        raise ValueError("first operator must have constant coefficients")
    _, invertible = K.leading_coefficient()
    if not invertible:
        raise ValueError("leading coefficient of the first operator is singular")
    if not is_compatible(K, H):
        raise ValueError("operators are not a compatible pair")
    h = _coerce_functional(h)
    F = H.apply(variational_derivative(h.rep, K.rows))
    G = _solve_operator_equation(K, F)
    if G is None:
        return None
    return homotopy_integrate(G)


def build_hierarchy(K, H, seed, steps):
    """Runs the recursion from a seed in the kernel of K.

    The seed must generate a zero flow under K.  Each of the requested
    steps appends one functional; an obstruction stops the run early and
    is recorded in the state.  The exact recursion between consecutive
    functionals is re-verified, and the full pairwise involution matrices
    under both operators are computed.
    """
    if steps < 0:
        raise ValueError("step count must be >= 0")
    seed = _coerce_functional(seed)
    _require_skewadjoint(K, "first operator")
    seed_flow = K.apply(variational_derivative(seed.rep, K.rows))
    if any(not f.is_zero() for f in seed_flow):
        raise ValueError("seed functional is not central for the first operator")
    functionals = [seed]
    obstructed_at = None
    for _ in range(steps):
        nxt = lenard_step(K, H, functionals[-1])
        if nxt is None:
            obstructed_at = len(functionals)
            break
        functionals.append(nxt)
    characteristics = [
        tuple(H.apply(variational_derivative(h.rep, K.rows))) for h in functionals
    ]
    for m in range(len(functionals) - 1):
        lhs = K.apply(variational_derivative(functionals[m + 1].rep, K.rows))
        rhs = characteristics[m]
        if any(a != b for a, b in zip(lhs, rhs)):
            raise RuntimeError("recursion witness failed")
    involution_H = [
        [involution_check(H, a, b) for b in functionals] for a in functionals
    ]
    involution_K = [
        [involution_check(K, a, b) for b in functionals] for a in functionals
    ]
    return HierarchyState(
        K, H, functionals, characteristics, obstructed_at, involution_H, involution_K
    )
