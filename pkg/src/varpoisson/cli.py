"""Expression grammar, operator documents, and the command-line surface.

Grammar of expressions (whitespace insensitive):

    expr     := ['-'] term (('+' | '-') term)*
    term     := factor ('*' factor)*
    factor   := atom ('^' uint)?
    atom     := rational | var | '(' expr ')'
    var      := 'u' uint ("'"* | '_' uint)
    rational := uint ('/' uint)?

A variable token names one differential variable: u2'' and u2_2 both mean
the second derivative of u2.  Quotes are printed for orders up to three
and the underscore form beyond that.  The leading minus sign on the first
term is a convenience extension of the sum rule.

Operator entries use the same grammar extended with the atom D, standing
for the total derivative, with coefficients written to the left, e.g.
"D^3 + 2*u1*D + u1'".  D may not appear inside parentheses and no factor
may follow a D factor in a term.

An operator document is a JSON object with keys "name" and "description"
(free metadata), "ell" (matrix size), and "entries" (square matrix of
entry strings).  A scalar-matrix file is a JSON square array of integers
or rational strings such as "3/2".

Exit codes: 0 when the command succeeds and any checked property holds,
1 when a checked mathematical property fails, 2 on malformed input.
"""

import argparse
import json
import sys
from fractions import Fraction

from .diffpoly import DiffPoly, LocalFunctional, format_poly, variational_derivative
from .matop import MatDiffOp, format_op_entry
from .polyvec import from_operator, schouten
from .hamcoh import (
    casimir_basis,
    cohomology_dimensions,
    inner_product,
    is_compatible,
    is_essential,
    is_hamiltonian,
)
from .superlie import (
    full_prolongation,
    htilde_dims,
    iso_check_translation_case,
    so_basis,
)
from .magri import build_hierarchy


class ParseError(ValueError):
    """Syntax or semantic error in an expression or document."""


def _tokenize(text):
    tokens = []
    line, col = 1, 1
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            col += 1
            i += 1
            continue
        start_col = col
        if ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            tokens.append(("uint", int(text[i:j]), line, start_col))
            col += j - i
            i = j
            continue
        if ch == "u":
            j = i + 1
            while j < len(text) and text[j].isdigit():
                j += 1
            if j == i + 1:
                raise ParseError(
                    f"line {line}, column {start_col}: expected a variable index after 'u'"
                )
            index = int(text[i + 1 : j])
            order = 0
            if j < len(text) and text[j] == "_":
                k = j + 1
                while k < len(text) and text[k].isdigit():
                    k += 1
                if k == j + 1:
                    raise ParseError(
                        f"line {line}, column {start_col}: expected a derivative order after '_'"
                    )
                order = int(text[j + 1 : k])
                j = k
            else:
                while j < len(text) and text[j] == "'":
                    order += 1
                    j += 1
            tokens.append(("var", (index, order), line, start_col))
            col += j - i
            i = j
            continue
        if ch == "D":
            tokens.append(("D", None, line, start_col))
            col += 1
            i += 1
            continue
        if ch in "+-*^/()":
            tokens.append((ch, None, line, start_col))
            col += 1
            i += 1
            continue
        raise ParseError(f"line {line}, column {start_col}: unexpected character {ch!r}")
    tokens.append(("end", None, line, col))
    return tokens


class _Parser:
    """Recursive descent over the token list; values are built directly."""

    def __init__(self, text, allow_d=False):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.allow_d = allow_d

    def peek(self):
        return self.tokens[self.pos]

    def take(self, kind=None):
        tok = self.tokens[self.pos]
        if kind is not None and tok[0] != kind:
            self.fail(f"expected {kind}")
        self.pos += 1
        return tok

    def fail(self, what):
        kind, _, line, col = self.peek()
        shown = "end of input" if kind == "end" else kind
        raise ParseError(f"line {line}, column {col}: {what}, found {shown}")

    # terms are (coefficient, power of D); plain expressions keep power 0
    def expr(self):
        total = {}
        negate = False
        if self.peek()[0] == "-":
            self.take()
            negate = True
        coef, power = self.term()
        self._accumulate(total, -coef if negate else coef, power)
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            coef, power = self.term()
            self._accumulate(total, -coef if op == "-" else coef, power)
        return total

    @staticmethod
    def _accumulate(total, coef, power):
        have = total.get(power)
        s = coef if have is None else have + coef
        if s:
            total[power] = s
        elif power in total:
            del total[power]

    def term(self):
        coef, power = self.factor()
        while self.peek()[0] == "*":
            self.take()
            c, p = self.factor()
            if power:
                if p:
                    self.fail("at most one D factor per term")
                self.fail("coefficients must be written to the left of D")
            coef = coef * c
            power += p
        return coef, power

    def factor(self):
        coef, power = self.atom()
        if self.peek()[0] == "^":
            self.take()
            e = self.take("uint")[1]
            if power:
                if power != 1:
                    self.fail("exponent applies to a single D")
                power = e
            else:
                out = DiffPoly._coerce(1)
                for _ in range(e):
                    out = out * coef
                coef = out
        return coef, power

    def atom(self):
        kind, value, line, col = self.peek()
        if kind == "uint":
            self.take()
            if self.peek()[0] == "/":
                self.take()
                den = self.take("uint")[1]
                if den == 0:
                    raise ParseError(f"line {line}, column {col}: zero denominator")
                return DiffPoly._coerce(Fraction(value, den)), 0
            return DiffPoly._coerce(value), 0
        if kind == "var":
            self.take()
            index, order = value
            return DiffPoly.var(index, order), 0
        if kind == "(":
            self.take()
            inner = self.expr()
            if set(inner) - {0}:
                self.fail("D is not allowed inside parentheses")
            self.take(")")
            return inner.get(0, DiffPoly()), 0
        if kind == "D":
            if not self.allow_d:
                self.fail("D is only allowed in operator entries")
            self.take()
            return DiffPoly._coerce(1), 1
        self.fail("expected a number, a variable, or '('")


def _check_indices(poly, ell):
    if ell is None:
        return
    for i in sorted(poly.indices()):
        if i > ell:
            raise ParseError(f"variable index {i} exceeds ell={ell}")


def parse_expr(text, ell=None):
    """Differential polynomial denoted by the expression text."""
    parser = _Parser(text)
    total = parser.expr()
    parser.take("end")
    poly = total.get(0, DiffPoly())
    _check_indices(poly, ell)
    return poly


def print_expr(poly):
    """Canonical text of a differential polynomial; inverse of parse_expr."""
    return format_poly(poly)


def parse_op_entry(text, ell=None):
    """Entry map {power of D: coefficient} denoted by the entry text."""
    parser = _Parser(text, allow_d=True)
    total = parser.expr()
    parser.take("end")
    for coef in total.values():
        _check_indices(coef, ell)
    return total


def parse_operator(document):
    """Matrix differential operator from a decoded operator document."""
    if not isinstance(document, dict):
        raise ParseError("operator document must be a JSON object")
    for key in ("ell", "entries"):
        if key not in document:
            raise ParseError(f"operator document lacks the key {key!r}")
    ell = document["ell"]
    if not isinstance(ell, int) or ell < 1:
        raise ParseError("ell must be a positive integer")
    entries = document["entries"]
    if (
        not isinstance(entries, list)
        or len(entries) != ell
        or any(not isinstance(row, list) or len(row) != ell for row in entries)
    ):
        raise ParseError(f"entries must be a {ell} by {ell} matrix of strings")
    grid = []
    for row in entries:
        out_row = []
        for text in row:
            if not isinstance(text, str):
                raise ParseError("operator entries must be strings")
            out_row.append(parse_op_entry(text, ell))
        grid.append(out_row)
    return MatDiffOp(grid)


def emit_report(pairs):
    """Stable key/value text block for a sequence of (key, value) pairs."""
    lines = []
    for key, value in pairs:
        lines.append(f"{key}: {_format_value(value)}")
    return "\n".join(lines) + "\n"


def _format_value(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, LocalFunctional):
        return f"int({format_poly(value.rep)})"
    if isinstance(value, DiffPoly):
        return format_poly(value)
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_format_value(v) for v in value) + "]"
    return str(value)


def _load_json(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from exc


def _load_operator(path):
    document = _load_json(path)
    op = parse_operator(document)
    name = document.get("name") if isinstance(document, dict) else None
    return op, (name if isinstance(name, str) and name else path)


def _load_matrix(path):
    data = _load_json(path)
    if not isinstance(data, list) or not data:
        raise ParseError(f"{path}: expected a JSON array of rows")
    n = len(data)
    out = []
    for row in data:
        if not isinstance(row, list) or len(row) != n:
            raise ParseError(f"{path}: matrix must be square")
        out_row = []
        for x in row:
            if isinstance(x, bool) or not isinstance(x, (int, str)):
                raise ParseError(f"{path}: entries must be integers or rational strings")
            try:
                out_row.append(Fraction(x))
            except (ValueError, ZeroDivisionError) as exc:
                raise ParseError(f"{path}: bad rational {x!r}") from exc
        out.append(out_row)
    return out


def _parse_vector(text, ell):
    parts = text.split(",")
    if len(parts) != ell:
        raise ParseError(f"expected {ell} comma-separated expressions")
    return [parse_expr(p, ell) for p in parts]


def _cmd_check_skewadjoint(args):
    op, name = _load_operator(args.K)
    verdict = op.is_skewadjoint()
    sys.stdout.write(emit_report([("operator", name), ("skewadjoint", verdict)]))
    return 0 if verdict else 1


def _cmd_check_hamiltonian(args):
    op, name = _load_operator(args.K)
    verdict = is_hamiltonian(op)
    sys.stdout.write(emit_report([("operator", name), ("hamiltonian", verdict)]))
    return 0 if verdict else 1


def _cmd_compatible(args):
    K, kname = _load_operator(args.K)
    H, hname = _load_operator(args.H)
    verdict = is_compatible(K, H)
    sys.stdout.write(
        emit_report([("first", kname), ("second", hname), ("compatible", verdict)])
    )
    return 0 if verdict else 1


def _cmd_schouten(args):
    P, pname = _load_operator(args.P)
    Q, qname = _load_operator(args.Q)
    bracket = schouten(from_operator(P), from_operator(Q))
    verdict = bracket.is_zero()
    sys.stdout.write(
        emit_report([("first", pname), ("second", qname), ("bracket_zero", verdict)])
    )
    return 0 if verdict else 1


def _cmd_cohomology(args):
    K, name = _load_operator(args.K)
    if args.kmax < -1:
        raise ParseError("kmax must be >= -1")
    reports = cohomology_dimensions(K, args.kmax)
    pairs = [
        ("operator", name),
        ("kmax", args.kmax),
        ("dims", [r.dim for r in reports]),
        ("bounds", [r.bound for r in reports]),
    ]
    for r in reports:
        pairs.append(
            (f"k={r.k}", f"dim {r.dim} bound {r.bound} attained {str(r.attained).lower()}")
        )
    sys.stdout.write(emit_report(pairs))
    return 0


def _cmd_casimirs(args):
    K, name = _load_operator(args.K)
    basis = casimir_basis(K)
    sys.stdout.write(
        emit_report(
            [
                ("operator", name),
                ("count", len(basis)),
                ("casimirs", ", ".join(_format_value(c) for c in basis)),
            ]
        )
    )
    return 0


def _cmd_lenard(args):
    K, kname = _load_operator(args.K)
    H, hname = _load_operator(args.H)
    if args.steps < 0:
        raise ParseError("steps must be >= 0")
    seed = LocalFunctional(parse_expr(args.seed, K.rows))
    if not is_compatible(K, H):
        sys.stdout.write(
            emit_report([("first", kname), ("second", hname), ("compatible", False)])
        )
        return 1
    state = build_hierarchy(K, H, seed, args.steps)
    pairs = [("first", kname), ("second", hname)]
    for m, h in enumerate(state.functionals):
        pairs.append((f"h_{m}", h))
    pairs.append(
        (
            "obstructed",
            "none" if state.obstructed_at is None else f"at step {state.obstructed_at}",
        )
    )
    all_true = all(all(row) for row in state.involution_H) and all(
        all(row) for row in state.involution_K
    )
    pairs.append(("involution", "all true" if all_true else "failure"))
    sys.stdout.write(emit_report(pairs))
    return 0 if state.obstructed_at is None and all_true else 1


def _cmd_inner_product(args):
    K, name = _load_operator(args.K)
    F = _parse_vector(args.F, K.rows)
    G = _parse_vector(args.G, K.rows)
    value = inner_product(K, F, G)
    sys.stdout.write(emit_report([("operator", name), ("inner_product", value)]))
    return 0


def _cmd_essential(args):
    K, kname = _load_operator(args.K)
    P, pname = _load_operator(args.P)
    verdict = is_essential(K, from_operator(P))
    sys.stdout.write(
        emit_report([("operator", kname), ("element", pname), ("essential", verdict)])
    )
    return 0 if verdict else 1


def _cmd_htilde(args):
    if args.n < 1:
        raise ParseError("n must be >= 1")
    S = _load_matrix(args.S)
    if len(S) != args.n:
        raise ParseError("matrix size does not match n")
    dims = htilde_dims(args.n, S)
    sys.stdout.write(
        emit_report(
            [("n", args.n), ("dims", list(dims)), ("total", sum(dims))]
        )
    )
    return 0


def _cmd_prolongation(args):
    if args.n < 1:
        raise ParseError("n must be >= 1")
    if args.kmax < -1:
        raise ParseError("kmax must be >= -1")
    S = _load_matrix(args.S)
    if len(S) != args.n:
        raise ParseError("matrix size does not match n")
    if args.pair == "so":
        basis = so_basis(args.n, S)
    else:
        basis = []
        for i in range(args.n):
            for j in range(args.n):
                M = [[Fraction(0)] * args.n for _ in range(args.n)]
                M[i][j] = Fraction(1)
                basis.append(M)
    dims = []
    for k in range(-1, args.kmax + 1):
        dim, _ = full_prolongation(args.n, basis, k)
        dims.append(dim)
    sys.stdout.write(
        emit_report([("pair", args.pair), ("n", args.n), ("kmax", args.kmax), ("dims", dims)])
    )
    return 0


def _cmd_iso_check(args):
    if args.ell < 1:
        raise ParseError("ell must be >= 1")
    S = _load_matrix(args.S)
    if len(S) != args.ell:
        raise ParseError("matrix size does not match ell")
    verdict = iso_check_translation_case(args.ell, S)
    sys.stdout.write(emit_report([("ell", args.ell), ("isomorphic", verdict)]))
    return 0 if verdict else 1


def _build_argparser():
    top = argparse.ArgumentParser(
        prog="vp",
        description="Exact computer algebra for variational Poisson structures.",
    )
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-skewadjoint", help="test an operator for skewadjointness")
    p.add_argument("--K", required=True, help="operator document")
    p.set_defaults(run=_cmd_check_skewadjoint)

    p = sub.add_parser("check-hamiltonian", help="test for a vanishing self-bracket")
    p.add_argument("--K", required=True, help="operator document")
    p.set_defaults(run=_cmd_check_hamiltonian)

    p = sub.add_parser("compatible", help="test a pair of operators for compatibility")
    p.add_argument("--K", required=True, help="operator document")
    p.add_argument("--H", required=True, help="operator document")
    p.set_defaults(run=_cmd_compatible)

    p = sub.add_parser("schouten", help="test whether the bracket of two operators vanishes")
    p.add_argument("--P", required=True, help="operator document")
    p.add_argument("--Q", required=True, help="operator document")
    p.set_defaults(run=_cmd_schouten)

    p = sub.add_parser("cohomology", help="dimensions of the complex of an operator")
    p.add_argument("--K", required=True, help="operator document")
    p.add_argument("--kmax", required=True, type=int, help="largest degree")
    p.set_defaults(run=_cmd_cohomology)

    p = sub.add_parser("casimirs", help="basis of linear central functionals")
    p.add_argument("--K", required=True, help="operator document")
    p.set_defaults(run=_cmd_casimirs)

    p = sub.add_parser("lenard", help="run the recursion from a seed functional")
    p.add_argument("--K", required=True, help="operator document")
    p.add_argument("--H", required=True, help="operator document")
    p.add_argument("--seed", required=True, help="seed expression")
    p.add_argument("--steps", required=True, type=int, help="number of steps")
    p.set_defaults(run=_cmd_lenard)

    p = sub.add_parser("inner-product", help="pairing of two vectors under an operator")
    p.add_argument("--K", required=True, help="operator document")
    p.add_argument("--F", required=True, help="comma-separated expressions")
    p.add_argument("--G", required=True, help="comma-separated expressions")
    p.set_defaults(run=_cmd_inner_product)

    p = sub.add_parser("essential", help="essential-closedness of a degree-1 element")
    p.add_argument("--K", required=True, help="operator document")
    p.add_argument("--P", required=True, help="operator document")
    p.set_defaults(run=_cmd_essential)

    p = sub.add_parser("htilde", help="dimensions of the quotient superalgebra")
    p.add_argument("--n", required=True, type=int, help="number of generators")
    p.add_argument("--S", required=True, help="matrix file")
    p.add_argument("--dims", action="store_true", help="print the dimension list")
    p.set_defaults(run=_cmd_htilde)

    p = sub.add_parser("prolongation", help="dimensions of a full prolongation")
    p.add_argument("--pair", required=True, choices=["so", "gl"], help="linear part")
    p.add_argument("--n", required=True, type=int, help="number of variables")
    p.add_argument("--S", required=True, help="matrix file")
    p.add_argument("--kmax", required=True, type=int, help="largest degree")
    p.set_defaults(run=_cmd_prolongation)

    p = sub.add_parser("iso-check", help="structure-constant match for K = S d")
    p.add_argument("--ell", required=True, type=int, help="number of variables")
    p.add_argument("--S", required=True, help="matrix file")
    p.set_defaults(run=_cmd_iso_check)

    return top


def main(argv=None):
    top = _build_argparser()
    args = top.parse_args(argv)
    try:
        return args.run(args)
    except (ParseError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
