"""
Reader for the mapping description format::

    # comments run to the end of the line
    vars x1 x2;
    (x1*x2)^2;
    (x1*x2)^3 + x1

A ``vars`` header names the variables ``x1 ... xn`` in order, then exactly
``n`` components follow, separated by ``;`` (a trailing ``;`` is allowed).
Components use integer literals, the operators ``+ - * ^`` and parentheses;
powers are positive integer literals.
"""
import re
from dataclasses import dataclass
from typing import Iterator, List, NamedTuple

from loguru import logger

from facon_api.errors import ParseError
from facon_api.services.algebra import MultiPoly, Space

MAX_POWER = 64
MAX_NESTING = 50
MAX_LITERAL_DIGITS = 1000
# Size ceilings on every intermediate result while expanding
MAX_DEGREE = 256
MAX_TERMS = 2000
MAX_PRODUCT_WORK = 100_000

TOKEN_PATTERN = re.compile(
    r"(?P<NUMBER>\d+)|(?P<NAME>[A-Za-z_][A-Za-z0-9_]*)|(?P<OP>[-+*^();])"
    r"|(?P<COMMENT>#[^\n]*)|(?P<NEWLINE>\n)|(?P<SKIP>[ \t\r\f\v]+)|(?P<MISMATCH>.)"
)


class Token(NamedTuple):
    kind: str
    text: str
    line: int
    column: int


@dataclass(frozen=True)
class PolynomialMapping:
    """F: C^n -> C^n given by ``n`` ambient polynomials."""

    n: int
    components: tuple[MultiPoly, ...]
    source_text: str = ""

    def __post_init__(self) -> None:
        if len(self.components) != self.n:
            raise ParseError(f"expected {self.n} components, found {len(self.components)}")
        for component in self.components:
            if component.space != Space.AMBIENT or component.nvars != self.n:
                raise ParseError(f"component {component.to_text()} is not a polynomial in x1..x{self.n}")

    @property
    def degree(self) -> int:
        return max((component.degree for component in self.components), default=0)

    def to_text(self) -> str:
        """Canonical text, re-readable by :func:`parse_mapping`."""
        header = "vars " + " ".join(f"x{index + 1}" for index in range(self.n))
        return "; ".join([header, *(component.to_text() for component in self.components)])


def tokenize(text: str) -> Iterator[Token]:
    line, line_start = 1, 0
    for match in TOKEN_PATTERN.finditer(text):
        kind = match.lastgroup
        column = match.start() - line_start + 1
        if kind == "NEWLINE":
            line, line_start = line + 1, match.end()
        elif kind in ("SKIP", "COMMENT"):
            continue
        elif kind == "MISMATCH":
            raise ParseError(f"unexpected character {match.group()!r}", line, column)
        elif kind == "NUMBER" and len(match.group()) > MAX_LITERAL_DIGITS:
            raise ParseError(f"integer literal longer than {MAX_LITERAL_DIGITS} digits", line, column)
        else:
            yield Token(kind, match.group(), line, column)


class _Parser:
    def __init__(self, text: str, space: Space, nvars: int) -> None:
        self.tokens: List[Token] = list(tokenize(text))
        self.position = 0
        self.space = space
        self.nvars = nvars
        self.depth = 0
        lines = text.split("\n")
        self.end = Token("END", "", len(lines), len(lines[-1]) + 1)

    # -- token helpers -----------------------------------------------------

    def peek(self) -> Token:
        return self.tokens[self.position] if self.position < len(self.tokens) else self.end

    def advance(self) -> Token:
        token = self.peek()
        if token.kind != "END":
            self.position += 1
        return token

    def accept(self, text: str) -> bool:
        token = self.peek()
        if token.kind in ("OP", "NAME") and token.text == text:
            self.position += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        token = self.peek()
        if not self.accept(text):
            raise ParseError(f"expected {text!r}, found {describe(token)}", token.line, token.column)
        return token

    def at_end(self) -> bool:
        return self.peek().kind == "END"

    # -- grammar -----------------------------------------------------------

    def header(self) -> int:
        self.expect("vars")
        count = 0
        while self.peek().kind == "NAME":
            token = self.advance()
            expected = f"{self.space.value}{count + 1}"
            if token.text != expected:
                raise ParseError(f"expected variable {expected} in vars header, found {token.text}", token.line, token.column)
            count += 1
        if count == 0:
            token = self.peek()
            raise ParseError("vars header declares no variables", token.line, token.column)
        self.expect(";")
        return count

    def polynomial(self) -> MultiPoly:
        self.depth += 1
        if self.depth > MAX_NESTING:
            token = self.peek()
            raise ParseError(f"expression nested deeper than {MAX_NESTING} levels", token.line, token.column)
        negate = False
        if self.accept("-"):
            negate = True
        elif self.accept("+"):
            pass
        result = self.term()
        if negate:
            result = -result
        while True:
            token = self.peek()
            if self.accept("+"):
                result = self.bounded(result + self.term(), token)
            elif self.accept("-"):
                result = self.bounded(result - self.term(), token)
            else:
                break
        self.depth -= 1
        return result

    def term(self) -> MultiPoly:
        result = self.factor()
        while True:
            token = self.peek()
            if not self.accept("*"):
                return result
            result = self.multiply(result, self.factor(), token)

    def factor(self) -> MultiPoly:
        base = self.primary()
        if self.accept("^"):
            token = self.advance()
            if token.kind != "NUMBER" or int(token.text) == 0:
                raise ParseError(
                    f"exponent must be a positive integer literal, found {describe(token)}", token.line, token.column
                )
            power = int(token.text)
            if power > MAX_POWER:
                raise ParseError(f"exponent {power} exceeds the limit {MAX_POWER}", token.line, token.column)
            if base.degree * power > MAX_DEGREE:
                raise ParseError(f"power has degree above the limit {MAX_DEGREE}", token.line, token.column)
            result = base
            for _ in range(power - 1):
                result = self.multiply(result, base, token)
            base = result
        return base

    def multiply(self, left: MultiPoly, right: MultiPoly, token: Token) -> MultiPoly:
        if left.degree + right.degree > MAX_DEGREE:
            raise ParseError(f"product has degree above the limit {MAX_DEGREE}", token.line, token.column)
        if len(left.terms) * len(right.terms) > MAX_PRODUCT_WORK:
            raise ParseError(
                f"product of {len(left.terms)} by {len(right.terms)} terms exceeds the expansion limit", token.line, token.column
            )
        return self.bounded(left * right, token)

    def bounded(self, result: MultiPoly, token: Token) -> MultiPoly:
        if len(result.terms) > MAX_TERMS:
            raise ParseError(f"expansion has more than {MAX_TERMS} terms", token.line, token.column)
        return result

    def primary(self) -> MultiPoly:
        token = self.advance()
        if token.kind == "NUMBER":
            return MultiPoly.constant(self.space, self.nvars, int(token.text))
        if token.kind == "NAME":
            return self.variable(token)
        if token.kind == "OP" and token.text == "(":
            inner = self.polynomial()
            self.expect(")")
            return inner
        raise ParseError(f"expected a number, a variable or '(', found {describe(token)}", token.line, token.column)

    def variable(self, token: Token) -> MultiPoly:
        match = re.fullmatch(rf"{self.space.value}([1-9][0-9]*)", token.text)
        if match is None or len(match.group(1)) > 6 or int(match.group(1)) > self.nvars:
            raise ParseError(f"unknown variable {token.text}", token.line, token.column)
        return MultiPoly.variable(self.space, self.nvars, int(match.group(1)) - 1)

    def mapping(self) -> List[MultiPoly]:
        components: List[MultiPoly] = []
        while not self.at_end():
            components.append(self.polynomial())
            if self.at_end():
                break
            token = self.peek()
            if not self.accept(";"):
                raise ParseError(f"expected ';' or end of input, found {describe(token)}", token.line, token.column)
        return components


def describe(token: Token) -> str:
    return "end of input" if token.kind == "END" else repr(token.text)


def parse_mapping(text: str) -> PolynomialMapping:
    """Parse a mapping description; raises :class:`ParseError` with a line/column diagnostic."""
    parser = _Parser(text, Space.AMBIENT, 0)
    parser.nvars = parser.header()
    components = parser.mapping()
    if len(components) != parser.nvars:
        raise ParseError(
            f"expected {parser.nvars} components, found {len(components)}", parser.end.line, parser.end.column
        )
    logger.debug(f"Parsed mapping with {parser.nvars} components")
    return PolynomialMapping(parser.nvars, tuple(components), text)


def parse_polynomial(text: str, space: Space, nvars: int) -> MultiPoly:
    """Parse one polynomial in the variables of ``space`` (no header)."""
    parser = _Parser(text, space, nvars)
    result = parser.polynomial()
    if not parser.at_end():
        token = parser.peek()
        raise ParseError(f"unexpected {describe(token)} after expression", token.line, token.column)
    return result
