"""
Expression language for polynomials, forms and polyvectors on a chart of dimension n.

Grammar, loosest binding first::

    expr   := wedge (('+' | '-') wedge)*
    wedge  := term ('^^' term)*
    term   := factor (('*' | '/') factor)*
    factor := unary ('^' INT)*
    unary  := '-' term | atom
    atom   := INT | 'i' | 't' | zK | zbK | dzK | dzbK | @K | @bK | '(' expr ')'

``^`` binds tighter than ``*`` and ``/``, which bind tighter than the wedge
``^^``, which binds tighter than ``+`` and ``-``.
"""
import dataclasses
import logging
import re
import typing as t

from sympy.polys.domains import QQ_I
from sympy.polys.rings import PolyElement, PolyRing

from genkahler.core.coeffring import I_UNIT, PolyScalar, chart_dim, format_rational, make_ring, t_gen, z, zb
from genkahler.core.errors import DimensionMismatchError, ParseError, UsageError
from genkahler.core.tensorcalc import Form, Polyvector, _Graded, d_z, d_zb, dz, dzb

# Set up logging
logger = logging.getLogger(__name__)

Value = t.Union[PolyScalar, Form, Polyvector]

# Operator groups in increasing binding power, as (symbol, associativity).
OPERATORS = [
    [("+", "left"), ("-", "left")],
    [("^^", "left")],
    [("*", "left"), ("/", "left")],
    [("^", "left")],
]
OPERATOR_PREC = {op: idx for idx, group in enumerate(OPERATORS) for op, _ in group}
OPERATOR_ASSOC = {op: assoc for group in OPERATORS for op, assoc in group}

TOKEN_RE = re.compile(
    r"(?P<space>[ \t\r]+)|(?P<newline>\n)|(?P<number>\d+)|(?P<vector>@b?\d+)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>\^\^|[-+*/^()])"
)
NAME_RE = re.compile(r"(dzb|dz|zb|z)(\d+)$")

KINDS = ("scalar", "form", "polyvector")


@dataclasses.dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(source: str) -> t.List[Token]:
    """Split source text into tokens carrying their line and column."""
    tokens = []
    line, line_start, pos = 1, 0, 0
    while pos < len(source):
        match = TOKEN_RE.match(source, pos)
        column = pos - line_start + 1
        if not match:
            raise ParseError(f"unexpected character {source[pos]!r}", line, column)
        kind = match.lastgroup
        if kind == "newline":
            line += 1
            line_start = match.end()
        elif kind != "space":
            tokens.append(Token(kind, match.group(), line, column))
        pos = match.end()
    tokens.append(Token("end", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    """Precedence-climbing parser that evaluates directly into core objects."""

    def __init__(self, source: str, R: PolyRing):
        self.tokens = tokenize(source)
        self.pos = 0
        self.R = R
        self.n = chart_dim(R)

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def parse(self) -> Value:
        if self.peek().kind == "end":
            raise ParseError("empty expression", self.peek().line, self.peek().column)
        value = self.expression(0)
        token = self.peek()
        if token.kind != "end":
            raise ParseError(f"unexpected {token.text!r}", token.line, token.column)
        return value

    def expression(self, min_prec: int) -> Value:
        lhs = self.unary()
        while True:
            token = self.peek()
            if token.kind != "op" or token.text not in OPERATOR_PREC:
                return lhs
            prec = OPERATOR_PREC[token.text]
            if prec < min_prec:
                return lhs
            self.advance()
            next_prec = prec + 1 if OPERATOR_ASSOC[token.text] == "left" else prec
            if token.text == "^":
                lhs = self.power(lhs, token)
                continue
            rhs = self.expression(next_prec)
            lhs = self.apply(token, lhs, rhs)

    def unary(self) -> Value:
        token = self.peek()
        if token.kind == "op" and token.text == "-":
            self.advance()
            return -self.expression(OPERATOR_PREC["*"])
        return self.atom()

    def atom(self) -> Value:
        token = self.advance()
        if token.kind == "number":
            return self.R.ground_new(QQ_I(int(token.text)))
        if token.kind == "vector":
            return self.vector(token)
        if token.kind == "name":
            return self.name(token)
        if token.kind == "op" and token.text == "(":
            value = self.expression(0)
            closing = self.advance()
            if closing.text != ")":
                raise ParseError("expected ')'", closing.line, closing.column)
            return value
        if token.kind == "end":
            raise ParseError("unexpected end of input", token.line, token.column)
        raise ParseError(f"unexpected {token.text!r}", token.line, token.column)

    def _index(self, token: Token, digits: str) -> int:
        k = int(digits)
        if k < 1 or k > self.n:
            raise ParseError(f"{token.text} is out of range for n={self.n}", token.line, token.column)
        return k - 1

    def vector(self, token: Token) -> Polyvector:
        body = token.text[1:]
        if body.startswith("b"):
            return d_zb(self.R, self._index(token, body[1:]))
        return d_z(self.R, self._index(token, body))

    def name(self, token: Token) -> Value:
        if token.text == "i":
            return self.R.ground_new(I_UNIT)
        if token.text == "t":
            return t_gen(self.R)
        match = NAME_RE.match(token.text)
        if not match:
            raise ParseError(f"unknown identifier {token.text!r}", token.line, token.column)
        prefix, digits = match.groups()
        j = self._index(token, digits)
        builders = {"z": z, "zb": zb, "dz": dz, "dzb": dzb}
        return builders[prefix](self.R, j)

    def power(self, base: Value, op: Token) -> Value:
        exponent = self.advance()
        if exponent.kind != "number":
            raise ParseError("exponent must be a non-negative integer", exponent.line, exponent.column)
        if not isinstance(base, PolyElement):
            raise ParseError("only scalars can be raised to a power", op.line, op.column)
        return base ** int(exponent.text)

    def apply(self, op: Token, lhs: Value, rhs: Value) -> Value:
        try:
            if op.text == "+":
                return _promote(lhs, rhs) + _promote(rhs, lhs)
            if op.text == "-":
                return _promote(lhs, rhs) - _promote(rhs, lhs)
            if op.text == "/":
                if not isinstance(rhs, PolyElement) or not rhs.is_ground or not rhs:
                    raise ParseError("division only by nonzero constants", op.line, op.column)
                inverse = QQ_I.one / rhs.LC
                return lhs * inverse if isinstance(lhs, _Graded) else lhs * self.R.ground_new(inverse)
            if op.text == "*":
                if isinstance(lhs, _Graded) and isinstance(rhs, _Graded):
                    raise ParseError("use ^^ to wedge forms or polyvectors", op.line, op.column)
                return _scale(lhs, rhs)
            return _wedge(lhs, rhs)
        except (DimensionMismatchError, ParseError):
            raise
        except UsageError as e:
            raise ParseError(str(e), op.line, op.column) from e


def _promote(value: Value, other: Value) -> Value:
    """Lift a scalar to the graded kind of the other operand."""
    if isinstance(value, PolyElement) and isinstance(other, _Graded):
        return type(other).from_poly(value)
    if isinstance(value, _Graded) and isinstance(other, _Graded) and type(value) is not type(other):
        raise UsageError("cannot combine a form with a polyvector")
    return value


def _scale(lhs: Value, rhs: Value) -> Value:
    if isinstance(lhs, _Graded):
        return lhs * rhs
    if isinstance(rhs, _Graded):
        return rhs * lhs
    return lhs * rhs


def _wedge(lhs: Value, rhs: Value) -> Value:
    if not isinstance(lhs, _Graded) or not isinstance(rhs, _Graded):
        return _scale(lhs, rhs)
    if type(lhs) is not type(rhs):
        raise UsageError("cannot wedge a form with a polyvector")
    return lhs.wedge(rhs)


def coerce(value: Value, kind: str, R: PolyRing) -> Value:
    """Convert a parsed value to the requested kind.

    A scalar becomes the degree-0 part of a form or polyvector; the zero scalar
    becomes the zero object of any kind.

    Raises:
        UsageError: If a form is requested as a polyvector or the reverse
    """
    if kind not in KINDS:
        raise UsageError(f"unknown kind {kind!r}")
    if kind == "scalar":
        if isinstance(value, _Graded):
            if value.degrees() not in ([], [0]):
                raise UsageError("expected a scalar expression")
            return value.coefficient(())
        return value
    target = Form if kind == "form" else Polyvector
    if isinstance(value, PolyElement):
        return target.from_poly(value) if value else target.zero(R)
    if not isinstance(value, target):
        raise UsageError(f"expected a {kind}, got a {type(value).__name__.lower()}")
    return value


def parse_expr(text: str, n: int, kind: t.Optional[str] = None) -> Value:
    """Parse an expression on the chart of dimension n.

    Args:
        text: Source text
        n: Chart dimension; identifiers with index above n are rejected
        kind: Optional 'scalar', 'form' or 'polyvector' to coerce the result

    Returns:
        A polynomial, Form or Polyvector over make_ring(n)

    Raises:
        ParseError: On syntax errors, unknown identifiers and ill-typed operations
    """
    R = make_ring(n)
    value = _Parser(text, R).parse()
    if kind is not None:
        try:
            value = coerce(value, kind, R)
        except UsageError as e:
            raise ParseError(str(e)) from e
    logger.debug(f"parsed {text!r} as {type(value).__name__}")
    return value


# ---------- printer -----------------------------------------------------------

def format_constant(c) -> str:
    """Parenthesised Gaussian rational, e.g. (1/2 + -3*i)."""
    c = QQ_I.convert(c)
    if not c.y:
        return f"({format_rational(c.x)})"
    if not c.x:
        return f"({format_rational(c.y)}*i)"
    return f"({format_rational(c.x)} + {format_rational(c.y)}*i)"


def _variable_names(R: PolyRing) -> t.List[str]:
    n = chart_dim(R)
    return [f"z{j + 1}" for j in range(n)] + [f"zb{j + 1}" for j in range(n)] + ["t"]


def format_scalar(p: PolyScalar) -> str:
    """Sum of coefficient*monomial terms in the ring's term order; '0' for zero."""
    if not p:
        return "0"
    names = _variable_names(p.ring)
    terms = []
    for monom, c in p.terms():
        factors = []
        for name, e in zip(names, monom):
            if e == 1:
                factors.append(name)
            elif e > 1:
                factors.append(f"{name}^{e}")
        terms.append("*".join([format_constant(c)] + factors))
    return " + ".join(terms)


def _basis_name(obj: _Graded, k: int) -> str:
    n = obj.n
    if isinstance(obj, Form):
        return f"dz{k + 1}" if k < n else f"dzb{k - n + 1}"
    return f"@{k + 1}" if k < n else f"@b{k - n + 1}"


def format_expr(obj: Value) -> str:
    """Canonical text that parse_expr maps back to an equal object."""
    if isinstance(obj, PolyElement):
        return format_scalar(obj)
    if not isinstance(obj, _Graded):
        raise UsageError(f"cannot format {type(obj).__name__}")
    if obj.is_zero():
        return "0"
    terms = []
    for idx, c in obj.items():
        coeff = f"({format_scalar(c)})"
        if idx:
            coeff += "*" + "^^".join(_basis_name(obj, k) for k in idx)
        terms.append(coeff)
    return " + ".join(terms)


def kind_of(obj: Value) -> str:
    if isinstance(obj, Form):
        return "form"
    if isinstance(obj, Polyvector):
        return "polyvector"
    return "scalar"
