"""Text format for polynomial systems.

One polynomial per line, ``#`` starts a comment, and an optional first line

    vars: x y z

fixes the variable order.  Without the header, variables are numbered in
order of first appearance.  Tokens are identifiers, integer and decimal
literals, and ``+ - * ^ ( )``.  Juxtaposition is not multiplication: ``2x``
is a syntax error, write ``2*x``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .poly import NonSquareSystemError, Polynomial, PolySystem


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class UnknownIdentifierError(ParseError):
    """An identifier not listed in the vars: header."""


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<number>\d+\.\d*|\.\d+|\d+)
  | (?P<op>[-+*^()])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # ident | number | op | end
    text: str
    line: int
    column: int


def _tokenize(text: str, line_no: int) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line_no, pos + 1)
        pos = m.end()
        kind = m.lastgroup
        if kind == "ws":
            continue
        tokens.append(_Token(kind, m.group(), line_no, m.start() + 1))
    tokens.append(_Token("end", "", line_no, len(text) + 1))
    return tokens


class _LineParser:
    """Recursive descent over one polynomial line.

    expr   := term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := ('+'|'-')* atom ('^' integer)?
    atom   := number | identifier | '(' expr ')'
    """

    def __init__(self, tokens: list[_Token], variables: "_VariablePool"):
        self.tokens = tokens
        self.pos = 0
        self.variables = variables

    @property
    def current(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, message: str):
        tok = self.current
        raise ParseError(message, tok.line, tok.column)

    def parse(self) -> Polynomial:
        poly = self.expr()
        if self.current.kind != "end":
            self.fail(f"expected operator before {self.current.text!r}")
        return poly

    def expr(self) -> Polynomial:
        poly = self.term()
        while self.current.kind == "op" and self.current.text in "+-":
            op = self.advance().text
            rhs = self.term()
            poly = poly + rhs if op == "+" else poly - rhs
        return poly

    def term(self) -> Polynomial:
        poly = self.factor()
        while self.current.kind == "op" and self.current.text == "*":
            self.advance()
            poly = poly * self.factor()
        return poly

    def factor(self) -> Polynomial:
        sign = 1.0
        while self.current.kind == "op" and self.current.text in "+-":
            if self.advance().text == "-":
                sign = -sign
        poly = self.atom()
        if self.current.kind == "op" and self.current.text == "^":
            caret = self.advance()
            exp_tok = self.current
            if exp_tok.kind != "number" or not exp_tok.text.isdigit():
                raise ParseError(
                    "exponent must be a non-negative integer literal", caret.line, exp_tok.column
                )
            self.advance()
            poly = poly ** int(exp_tok.text)
        if sign < 0:
            poly = -poly
        return poly

    def atom(self) -> Polynomial:
        tok = self.current
        if tok.kind == "number":
            self.advance()
            return self.variables.constant(float(tok.text))
        if tok.kind == "ident":
            self.advance()
            return self.variables.variable(tok)
        if tok.kind == "op" and tok.text == "(":
            self.advance()
            poly = self.expr()
            if not (self.current.kind == "op" and self.current.text == ")"):
                self.fail("expected ')'")
            self.advance()
            return poly
        if tok.kind == "end":
            self.fail("unexpected end of line")
        self.fail(f"unexpected token {tok.text!r}")


class _VariablePool:
    """Maps identifiers to variable indices, either declared or discovered.

    Parsing is a two-phase affair when no header is given: names are
    collected first so every polynomial is built over the full variable set.
    """

    def __init__(self, declared: list[str] | None):
        self.declared = declared is not None
        self.names: list[str] = list(declared or [])
        self.index = {name: i for i, name in enumerate(self.names)}

    def observe(self, tok: _Token) -> None:
        if tok.text not in self.index:
            if self.declared:
                raise UnknownIdentifierError(
                    f"unknown identifier {tok.text!r} (not in vars: header)",
                    tok.line,
                    tok.column,
                )
            self.index[tok.text] = len(self.names)
            self.names.append(tok.text)

    def constant(self, value: float) -> Polynomial:
        return Polynomial.constant(len(self.names), value)

    def variable(self, tok: _Token) -> Polynomial:
        return Polynomial.variable(len(self.names), self.index[tok.text])


def _strip_comment(line: str) -> str:
    cut = line.find("#")
    return line if cut < 0 else line[:cut]


def parse_system(text: str) -> PolySystem:
    """Parse a full system; raises ParseError or NonSquareSystemError."""
    lines = text.splitlines()
    body: list[tuple[int, str]] = []
    declared: list[str] | None = None
    for i, raw in enumerate(lines, start=1):
        stripped = _strip_comment(raw).strip()
        if not stripped:
            continue
        if declared is None and not body and stripped.startswith("vars:"):
            names = stripped[len("vars:"):].split()
            if not names:
                raise ParseError("empty vars: header", i, 1)
            seen = set()
            for name in names:
                if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name):
                    raise ParseError(f"bad variable name {name!r}", i, 1)
                if name in seen:
                    raise ParseError(f"duplicate variable {name!r}", i, 1)
                seen.add(name)
            declared = names
            continue
        body.append((i, _strip_comment(raw)))

    if not body:
        raise ParseError("no polynomials in input", len(lines) + 1, 1)

    tokenized = [_tokenize(line, line_no) for line_no, line in body]
    pool = _VariablePool(declared)
    for tokens in tokenized:
        for tok in tokens:
            if tok.kind == "ident":
                pool.observe(tok)
    if not pool.names:
        first = tokenized[0][0]
        raise ParseError("system declares no variables", first.line, first.column)

    polys = [_LineParser(tokens, pool).parse() for tokens in tokenized]
    if len(polys) != len(pool.names):
        raise NonSquareSystemError(
            f"system has {len(polys)} equations in {len(pool.names)} variables"
        )
    return PolySystem.from_polys(polys, pool.names)


def parse_polynomial(text: str, var_names: list[str]) -> Polynomial:
    """Parse a single polynomial over a fixed variable list (test helper)."""
    pool = _VariablePool(list(var_names))
    tokens = _tokenize(_strip_comment(text), 1)
    for tok in tokens:
        if tok.kind == "ident":
            pool.observe(tok)
    return _LineParser(tokens, pool).parse()
