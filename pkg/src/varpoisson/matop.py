"""Matrix differential operators with differential polynomial coefficients.

An entry is a finite map {power m: coefficient}, standing for the scalar
operator sum_m c_m d^m with coefficients written on the left.  Composition
expands the commutation d o f = f d + f' exactly, and the adjoint of
L = sum_n l_n d^n is L* = sum_n (-d)^n o l_n.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb

from .diffpoly import DiffPoly, partial_derivative, total_derivative
from . import linalg


def _coerce_entry(entry):
    out = {}
    for m, c in entry.items():
        if not isinstance(m, int) or m < 0:
            raise ValueError(f"bad power of D: {m!r}")
        c = DiffPoly._coerce(c)
        if c is None:
            raise TypeError("entry coefficients must be DiffPoly or rational")
        if c:
            out[m] = c
    return out


def _entry_add(a, b):
    out = dict(a)
    for m, c in b.items():
        s = out.get(m)
        s = c if s is None else s + c
        if s:
            out[m] = s
        elif m in out:
            del out[m]
    return out


def _entry_neg(a):
    return {m: -c for m, c in a.items()}


def _entry_scale(a, q):
    q = Fraction(q)
    if not q:
        return {}
    return {m: c * q for m, c in a.items()}


def _entry_compose(a, b):
    # (sum_n c_n d^n) o (sum_m e_m d^m), Leibniz-expanded
    out = {}
    for n, c in a.items():
        for m, e in b.items():
            for k in range(n + 1):
                term = comb(n, k) * (c * total_derivative(e, n - k))
                if not term:
                    continue
                p = k + m
                s = out.get(p)
                s = term if s is None else s + term
                if s:
                    out[p] = s
                elif p in out:
                    del out[p]
    return out


def _entry_adjoint(a):
    # adjoint of sum_n l_n d^n is sum_n (-d)^n o l_n
    out = {}
    for n, c in a.items():
        for k in range(n + 1):
            term = Fraction(-1) ** n * comb(n, k) * total_derivative(c, n - k)
            if not term:
                continue
            s = out.get(k)
            s = term if s is None else s + term
            if s:
                out[k] = s
            elif k in out:
                del out[k]
    return out


def _entry_apply(a, f):
    acc = DiffPoly()
    for m, c in a.items():
        acc = acc + c * total_derivative(f, m)
    return acc


class MatDiffOp:
    """Rectangular matrix of scalar differential operators."""

    __slots__ = ("rows", "cols", "entries")
    __hash__ = None

    def __init__(self, entries):
        grid = [[_coerce_entry(e) for e in row] for row in entries]
        if not grid or not grid[0]:
            raise ValueError("operator must have at least one row and column")
        cols = len(grid[0])
        if any(len(row) != cols for row in grid):
            raise ValueError("ragged entry grid")
        self.rows = len(grid)
        self.cols = cols
        self.entries = grid

    @staticmethod
    def zero(rows, cols=None):
        cols = rows if cols is None else cols
        return MatDiffOp([[{} for _ in range(cols)] for _ in range(rows)])

    @staticmethod
    def identity(ell):
        return MatDiffOp(
            [[{0: 1} if i == j else {} for j in range(ell)] for i in range(ell)]
        )

    @staticmethod
    def from_constant_matrix(M, power=0):
        """Operator with entries M[i][j] * D^power."""
        return MatDiffOp([[{power: Fraction(c)} for c in row] for row in M])

    def entry(self, i, j):
        """Entry at 1-based position (i, j) as a {power: DiffPoly} map."""
        return self.entries[i - 1][j - 1]

    def order(self):
        """Largest power of D appearing; -1 for the zero operator."""
        return max((m for row in self.entries for e in row for m in e), default=-1)

    def is_zero(self):
        return all(not e for row in self.entries for e in row)

    def __eq__(self, other):
        if not isinstance(other, MatDiffOp):
            return NotImplemented
        return (
            self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def __add__(self, other):
        if not isinstance(other, MatDiffOp):
            return NotImplemented
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        return MatDiffOp(
            [
                [_entry_add(a, b) for a, b in zip(r1, r2)]
                for r1, r2 in zip(self.entries, other.entries)
            ]
        )

    def __sub__(self, other):
        if not isinstance(other, MatDiffOp):
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        return MatDiffOp([[_entry_neg(e) for e in row] for row in self.entries])

    def __rmul__(self, q):
        if isinstance(q, (int, Fraction)):
            return MatDiffOp([[_entry_scale(e, q) for e in row] for row in self.entries])
        return NotImplemented

    def apply(self, F):
        F = [DiffPoly._coerce(f) for f in F]
        if len(F) != self.cols or any(f is None for f in F):
            raise ValueError(f"expected {self.cols} polynomial components")
        return [
            sum((_entry_apply(e, f) for e, f in zip(row, F)), DiffPoly())
            for row in self.entries
        ]

    def compose(self, other):
        if not isinstance(other, MatDiffOp):
            raise TypeError("compose wants a MatDiffOp")
        if self.cols != other.rows:
            raise ValueError("inner dimensions do not match")
        grid = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = {}
                for k in range(self.cols):
                    acc = _entry_add(
                        acc, _entry_compose(self.entries[i][k], other.entries[k][j])
                    )
                row.append(acc)
            grid.append(row)
        return MatDiffOp(grid)

    def adjoint(self):
        return MatDiffOp(
            [
                [_entry_adjoint(self.entries[j][i]) for j in range(self.rows)]
                for i in range(self.cols)
            ]
        )

    def is_skewadjoint(self):
        if self.rows != self.cols:
            raise ValueError("skewadjointness needs a square operator")
        return self.adjoint() == -self

    def is_quasiconstant(self):
        return all(
            c.is_constant() for row in self.entries for e in row for c in e.values()
        )

    def leading_coefficient(self):
        """Matrix of coefficients at the top power of D, with invertibility.

        Returns (matrix of Fractions, invertible flag).  The flag needs a
        square operator, and the top coefficients must be constants.
        """
        if self.rows != self.cols:
            raise ValueError("leading-coefficient test needs a square operator")
        N = self.order()
        if N < 0:
            N = 0
        M = []
        for row in self.entries:
            out = []
            for e in row:
                c = e.get(N, DiffPoly())
                if not c.is_constant():
                    raise ValueError("leading coefficient is not constant")
                out.append(c.constant_term())
            M.append(out)
        return M, linalg.is_invertible(M)

    def constant_coefficient(self, n):
        """The rational matrix of D^n coefficients of a quasiconstant operator."""
        if not self.is_quasiconstant():
            raise ValueError("operator is not quasiconstant")
        return [
            [e.get(n, DiffPoly()).constant_term() for e in row] for row in self.entries
        ]

    def __str__(self):
        body = "; ".join(
            ", ".join(format_op_entry(e) for e in row) for row in self.entries
        )
        return f"[{body}]"

    def __repr__(self):
        return f"MatDiffOp({self})"


def d_operator(ell=1):
    """The diagonal operator with D in every diagonal entry."""
    return MatDiffOp.from_constant_matrix(linalg.identity(ell), power=1)


def frechet(P):
    """Frechet derivative of a characteristic: entries sum_n (dP_i/du_j^(n)) D^n."""
    P = [DiffPoly._coerce(c) for c in P]
    if not P or any(c is None for c in P):
        raise ValueError("characteristic must be a nonempty polynomial sequence")
    ell = len(P)
    grid = []
    for i in range(ell):
        row = []
        max_n = P[i].max_order()
        for j in range(1, ell + 1):
            e = {}
            for n in range(max_n + 1):
                g = partial_derivative(P[i], j, n)
                if g:
                    e[n] = g
            row.append(e)
        grid.append(row)
    return MatDiffOp(grid)


def format_op_entry(entry):
    """Canonical text for one operator entry, e.g. 'D^3 + 2*u1*D + u1''."""
    if not entry:
        return "0"
    parts = []
    for m in sorted(entry, key=lambda x: -x):
        c = entry[m]
        if m == 0:
            d_str = None
        elif m == 1:
            d_str = "D"
        else:
            d_str = f"D^{m}"
        if len(c.terms) == 1:
            ((mon, q),) = c.terms.items()
            body = str(DiffPoly({mon: abs(q)}))
            sign = "-" if q < 0 else "+"
            if d_str is not None:
                body = d_str if body == "1" else f"{body}*{d_str}"
        else:
            sign = "+"
            body = f"({c})" if d_str is None else f"({c})*{d_str}"
        parts.append((sign, body))
    sign, body = parts[0]
    out = ("-" if sign == "-" else "") + body
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out
