"""Differential polynomials in dependent variables u_i and their derivatives.

The ring is Q[u_i^(n) : 1 <= i <= ell, n >= 0] with the total derivative d
acting by d(u_i^(n)) = u_i^(n+1).  A variable is a pair (i, n); a monomial is
a sorted tuple of ((i, n), exponent) pairs; a polynomial is a sparse dict
mapping monomials to nonzero Fractions.

Design constraints honoured throughout:

* all arithmetic is exact (Fraction coefficients, no floats);
* partial derivatives d/du_i^(n) and the total derivative satisfy the
  commutation rule [d/du_i^(n), d] = d/du_i^(n-1);
* the variational derivative delta f / delta u_i = sum_n (-d)^n df/du_i^(n)
  kills total derivatives, which is what makes functional equality decidable.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import comb

from . import linalg


def _var_key(var):
    i, n = var
    return (n, i)


def _mon_key(mon):
    return tuple((_var_key(v), e) for v, e in mon)


def _mon_mul(m1, m2):
    if not m1:
        return m2
    if not m2:
        return m1
    acc = dict(m1)
    for v, e in m2:
        acc[v] = acc.get(v, 0) + e
    return tuple(sorted(acc.items(), key=lambda p: _var_key(p[0])))


def _mon_degree(mon):
    return sum(e for _, e in mon)


class DiffPoly:
    """Sparse differential polynomial with exact rational coefficients."""

    __slots__ = ("terms",)
    __hash__ = None

    def __init__(self, terms=None):
        # terms: dict monomial -> Fraction, zero coefficients dropped
        self.terms = {} if terms is None else terms

    @staticmethod
    def zero():
        return DiffPoly({})

    @staticmethod
    def const(c):
        c = Fraction(c)
        return DiffPoly({(): c}) if c else DiffPoly({})

    @staticmethod
    def var(i, n=0):
        if i < 1:
            raise ValueError(f"dependent variable index must be >= 1, got {i}")
        if n < 0:
            raise ValueError(f"derivative order must be >= 0, got {n}")
        return DiffPoly({(((i, n), 1),): Fraction(1)})

    @staticmethod
    def _coerce(other):
        if isinstance(other, DiffPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return DiffPoly.const(other)
        return None

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return all(m == () for m in self.terms)

    def constant_term(self):
        return self.terms.get((), Fraction(0))

    def __eq__(self, other):
        other = DiffPoly._coerce(other)
        if other is None:
            return NotImplemented
        return self.terms == other.terms

    def __add__(self, other):
        other = DiffPoly._coerce(other)
        if other is None:
            return NotImplemented
        acc = dict(self.terms)
        for m, c in other.terms.items():
            s = acc.get(m)
            if s is None:
                acc[m] = c
            else:
                s = s + c
                if s:
                    acc[m] = s
                else:
                    del acc[m]
        return DiffPoly(acc)

    __radd__ = __add__

    def __neg__(self):
        return DiffPoly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = DiffPoly._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            if not q:
                return DiffPoly()
            return DiffPoly({m: c * q for m, c in self.terms.items()})
        if not isinstance(other, DiffPoly):
            return NotImplemented
        acc = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mon_mul(m1, m2)
                s = acc.get(m)
                if s is None:
                    acc[m] = c1 * c2
                else:
                    s = s + c1 * c2
                    if s:
                        acc[m] = s
                    else:
                        del acc[m]
        return DiffPoly(acc)

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = DiffPoly.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def total_degree(self):
        return max((_mon_degree(m) for m in self.terms), default=0)

    def max_order(self):
        """Highest derivative order appearing; -1 for constants."""
        return max((n for m in self.terms for (_, n), _ in m), default=-1)

    def indices(self):
        """Set of dependent-variable indices appearing."""
        return {i for m in self.terms for (i, _), _ in m}

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"DiffPoly({format_poly(self)})"


def u(i, n=0):
    return DiffPoly.var(i, n)


def _var_str(i, n):
    if n == 0:
        return f"u{i}"
    if n <= 3:
        return f"u{i}" + "'" * n
    return f"u{i}_{n}"


def format_poly(f):
    """Canonical text form, parseable by the expression grammar."""
    if not f.terms:
        return "0"
    parts = []
    for mon in sorted(f.terms, key=lambda m: (-_mon_degree(m), _mon_key(m))):
        c = f.terms[mon]
        factors = []
        for (i, n), e in mon:
            v = _var_str(i, n)
            factors.append(v if e == 1 else f"{v}^{e}")
        if not factors:
            body = str(abs(c))
        elif abs(c) == 1:
            body = "*".join(factors)
        else:
            body = str(abs(c)) + "*" + "*".join(factors)
        parts.append(("-" if c < 0 else "+", body))
    sign, body = parts[0]
    out = ("-" if sign == "-" else "") + body
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def total_derivative(f, order=1):
    """Apply the total derivative d, `order` times."""
    if order < 0:
        raise ValueError("derivative order must be >= 0")
    for _ in range(order):
        acc = {}
        for mon, c in f.terms.items():
            for pos, (var, e) in enumerate(mon):
                i, n = var
                rest = dict(mon)
                if e == 1:
                    del rest[var]
                else:
                    rest[var] = e - 1
                rest[(i, n + 1)] = rest.get((i, n + 1), 0) + 1
                m = tuple(sorted(rest.items(), key=lambda p: _var_key(p[0])))
                s = acc.get(m, Fraction(0)) + c * e
                if s:
                    acc[m] = s
                elif m in acc:
                    del acc[m]
        f = DiffPoly(acc)
    return f


def partial_derivative(f, i, n):
    """d f / d u_i^(n), treating each u_j^(m) as an independent variable."""
    var = (i, n)
    acc = {}
    for mon, c in f.terms.items():
        d = dict(mon)
        e = d.get(var)
        if not e:
            continue
        if e == 1:
            del d[var]
        else:
            d[var] = e - 1
        m = tuple(sorted(d.items(), key=lambda p: _var_key(p[0])))
        s = acc.get(m, Fraction(0)) + c * e
        if s:
            acc[m] = s
        elif m in acc:
            del acc[m]
    return DiffPoly(acc)


def variational_derivative(f, ell=None):
    """delta f / delta u as a tuple of ell polynomials.

    Component i is sum_n (-d)^n ( df / du_i^(n) ).  When ell is omitted it
    defaults to the largest variable index appearing in f (at least 1).
    """
    if ell is None:
        ell = max(f.indices(), default=1)
    if ell < 1:
        raise ValueError("number of dependent variables must be >= 1")
    bad = [i for i in f.indices() if i > ell]
    if bad:
        raise ValueError(f"variable index {max(bad)} exceeds ell={ell}")
    out = []
    for i in range(1, ell + 1):
        acc = DiffPoly()
        for n in range(f.max_order() + 1):
            g = partial_derivative(f, i, n)
            if g:
                acc = acc + Fraction(-1) ** n * total_derivative(g, n)
        out.append(acc)
    return tuple(out)


def evolutionary_apply(P, f):
    """Action of the evolutionary field with characteristic P on f.

    X_P(f) = sum_{j,n} d^n(P_j) * df/du_j^(n); the index j runs over the
    positions of P (1-based).
    """
    P = list(P)
    acc = DiffPoly()
    # cache successive total derivatives of each component
    ders = {j: [P[j - 1]] for j in range(1, len(P) + 1)}
    for j in range(1, len(P) + 1):
        for n in range(f.max_order() + 1):
            g = partial_derivative(f, j, n)
            if not g:
                continue
            col = ders[j]
            while len(col) <= n:
                col.append(total_derivative(col[-1]))
            acc = acc + col[n] * g
    return acc


def functional_equal(f, g):
    """Equality of int f and int g in the quotient by total derivatives.

    f - g is a total derivative iff all its variational derivatives vanish
    and its constant term is zero; both checks are exact.
    """
    f = DiffPoly._coerce(f)
    g = DiffPoly._coerce(g)
    d = f - g
    if d.constant_term():
        return False
    for i in sorted(d.indices()):
        acc = DiffPoly()
        for n in range(d.max_order() + 1):
            h = partial_derivative(d, i, n)
            if h:
                acc = acc + Fraction(-1) ** n * total_derivative(h, n)
        if acc:
            return False
    return True


class LocalFunctional:
    """Class of a differential polynomial modulo total derivatives."""

    __slots__ = ("rep",)
    __hash__ = None

    def __init__(self, rep):
        rep = DiffPoly._coerce(rep)
        if rep is None:
            raise TypeError("LocalFunctional wants a DiffPoly or a constant")
        self.rep = rep

    def __eq__(self, other):
        if isinstance(other, LocalFunctional):
            return functional_equal(self.rep, other.rep)
        return NotImplemented

    def __add__(self, other):
        if not isinstance(other, LocalFunctional):
            return NotImplemented
        return LocalFunctional(self.rep + other.rep)

    def __sub__(self, other):
        if not isinstance(other, LocalFunctional):
            return NotImplemented
        return LocalFunctional(self.rep - other.rep)

    def __neg__(self):
        return LocalFunctional(-self.rep)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return LocalFunctional(self.rep * other)
        return NotImplemented

    def is_zero(self):
        return functional_equal(self.rep, DiffPoly.zero())

    def __repr__(self):
        return f"int({format_poly(self.rep)})"


def _monomials_of_degree(variables, degree):
    for combo in itertools.combinations_with_replacement(variables, degree):
        acc = {}
        for v in combo:
            acc[v] = acc.get(v, 0) + 1
        yield tuple(sorted(acc.items(), key=lambda p: _var_key(p[0])))


def antiderivative(f):
    """A g with d(g) = f when f is a total derivative, else None.

    The solve is a bounded exact linear system: d preserves total degree and
    raises the maximal derivative order by exactly one, so g lives in the
    monomial space of the same degree with order at most max_order(f) - 1 and
    the same variable indices.  The canonical echelon solution is returned
    (no free additive constant).
    """
    if not functional_equal(f, DiffPoly.zero()):
        return None
    if f.is_zero():
        return DiffPoly.zero()
    idx = sorted(f.indices())
    max_n = max(f.max_order() - 1, 0)
    variables = [(i, n) for n in range(max_n + 1) for i in idx]
    by_degree = {}
    for mon, c in f.terms.items():
        by_degree.setdefault(_mon_degree(mon), {})[mon] = c
    g = DiffPoly()
    for degree, part in sorted(by_degree.items()):
        candidates = [m for m in _monomials_of_degree(variables, degree)]
        columns = [total_derivative(DiffPoly({m: Fraction(1)})) for m in candidates]
        row_index = {}
        for col in columns:
            for m in col.terms:
                row_index.setdefault(m, len(row_index))
        for m in part:
            row_index.setdefault(m, len(row_index))
        matrix = [[Fraction(0)] * len(candidates) for _ in range(len(row_index))]
        for jcol, col in enumerate(columns):
            for m, c in col.terms.items():
                matrix[row_index[m]][jcol] = c
        rhs = [Fraction(0)] * len(row_index)
        for m, c in part.items():
            rhs[row_index[m]] = c
        x = linalg.solve(matrix, rhs)
        if x is None:
            return None
        g = g + DiffPoly({m: c for m, c in zip(candidates, x) if c})
    return g


def _frechet_entry(P_i, j, max_n):
    """Coefficients {n: dP_i/du_j^(n)} of the Frechet derivative entry."""
    out = {}
    for n in range(max_n + 1):
        g = partial_derivative(P_i, j, n)
        if g:
            out[n] = g
    return out


def _frechet_selfadjoint(P):
    """True iff the Frechet derivative of P equals its formal adjoint."""
    P = list(P)
    ell = len(P)
    max_n = max((c.max_order() for c in P), default=-1)
    for i in range(1, ell + 1):
        for j in range(1, ell + 1):
            direct = _frechet_entry(P[i - 1], j, max_n)
            # adjoint of the (j, i) entry: sum_n (-d)^n o ( dP_j/du_i^(n) )
            other = _frechet_entry(P[j - 1], i, max_n)
            adj = {}
            for n, c in other.items():
                for b in range(n + 1):
                    coef = Fraction(-1) ** n * comb(n, b)
                    term = coef * total_derivative(c, n - b)
                    if term:
                        adj[b] = adj.get(b, DiffPoly()) + term
            adj = {b: v for b, v in adj.items() if v}
            if direct != adj:
                return False
    return True


def homotopy_integrate(P):
    """Functional h with delta h / delta u = P, by the scaling homotopy.

    h = sum_i int_0^1 u_i P_i(t u) dt evaluated termwise: a monomial of
    degree d in P_i picks up the factor 1/(d+1).  The Frechet derivative of
    P must be self-adjoint, which is exactly the solvability condition;
    None is returned when it is not.
    """
    P = list(P)
    if not P:
        raise ValueError("empty characteristic")
    ell = len(P)
    for c in P:
        bad = [i for i in c.indices() if i > ell]
        if bad:
            raise ValueError(f"variable index {max(bad)} exceeds ell={ell}")
    if not _frechet_selfadjoint(P):
        return None
    h = DiffPoly()
    for i in range(1, ell + 1):
        ui = DiffPoly.var(i)
        for mon, c in P[i - 1].terms.items():
            d = _mon_degree(mon)
            h = h + (c / (d + 1)) * (ui * DiffPoly({mon: Fraction(1)}))
    return LocalFunctional(h)
