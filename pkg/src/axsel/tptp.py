"""Tokenizer and parser for the supported TPTP-style FOF subset.

Grammar (informal):

    file        :=  ( annotated | include )*
    annotated   :=  'fof' '(' name ',' role ',' formula ')' '.'
    include     :=  'include' '(' squoted ')' '.'
    formula     :=  or_expr ( ('=>' | '<=>') or_expr )?      # non-associative
    or_expr     :=  and_expr ( '|' and_expr )*
    and_expr    :=  unitary ( '&' unitary )*
    unitary     :=  quantified | '~' unitary | '(' formula ')' | atom
    quantified  :=  ('!' | '?') '[' VAR (',' VAR)* ']' ':' unitary
    atom        :=  term ( ('=' | '!=') term )?
    term        :=  VAR | name ( '(' term (',' term)* ')' )?
    name        :=  lower_word | single_quoted | integer

`%` starts a line comment. Equality is a reserved sign, not a symbol.
TFF/THF/CNF inputs and the connectives `<=`, `<~>`, `~|`, `~&` are
recognized and rejected as unsupported.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .errors import AxselError
from .fol import (
    And,
    Atom,
    Equals,
    Exists,
    Forall,
    Formula,
    Func,
    Iff,
    Implies,
    Not,
    Or,
    Term,
    Var,
)


class ParseError(AxselError):
    """Malformed input. Carries 1-based line and column."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class UnsupportedConstruct(ParseError):
    """Recognized TPTP syntax outside the supported subset."""


# ---------------------------------------------------------------------------
# Tokenizer

_WORD_CHARS = frozenset("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_")

# Multi-character punctuation, longest first so '<=>' wins over '<='.
_PUNCT = ["<=>", "<~>", "=>", "<=", "!=", "~|", "~&", "(", ")", "[", "]", ",", ":", ".", "&", "|", "~", "!", "?", "="]

_UNSUPPORTED_PUNCT = {"<=": "reverse implication '<='", "<~>": "xor connective '<~>'",
                      "~|": "nor connective '~|'", "~&": "nand connective '~&'"}


@dataclass(frozen=True)
class Token:
    kind: str  # 'lower', 'upper', 'quoted', 'int', or the punctuation itself
    text: str
    line: int
    column: int


def tokenize(source: str) -> Iterator[Token]:
    line = 1
    col = 1
    i = 0
    n = len(source)
    while i < n:
        ch = source[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "%":
            while i < n and source[i] != "\n":
                i += 1
            continue
        if ch == "'":
            start_line, start_col = line, col
            i += 1
            col += 1
            buf = []
            while True:
                if i >= n:
                    raise ParseError("unterminated quoted name", start_line, start_col)
                c = source[i]
                if c == "\\":
                    if i + 1 >= n:
                        raise ParseError("unterminated escape in quoted name", line, col)
                    buf.append(source[i + 1])
                    i += 2
                    col += 2
                    continue
                if c == "'":
                    i += 1
                    col += 1
                    break
                if c == "\n":
                    raise ParseError("newline inside quoted name", start_line, start_col)
                buf.append(c)
                i += 1
                col += 1
            if not buf:
                raise ParseError("empty quoted name", start_line, start_col)
            yield Token("quoted", "".join(buf), start_line, start_col)
            continue
        if ch in _WORD_CHARS:
            start_line, start_col = line, col
            j = i
            while j < n and source[j] in _WORD_CHARS:
                j += 1
            word = source[i:j]
            col += j - i
            i = j
            if word[0].isdigit():
                if not word.isdigit():
                    raise ParseError(f"malformed number {word!r}", start_line, start_col)
                yield Token("int", word, start_line, start_col)
            elif word[0] == "_" or word[0].isupper():
                yield Token("upper", word, start_line, start_col)
            else:
                yield Token("lower", word, start_line, start_col)
            continue
        for punct in _PUNCT:
            if source.startswith(punct, i):
                if punct in _UNSUPPORTED_PUNCT:
                    raise UnsupportedConstruct(_UNSUPPORTED_PUNCT[punct], line, col)
                yield Token(punct, punct, line, col)
                i += len(punct)
                col += len(punct)
                break
        else:
            raise ParseError(f"unexpected character {ch!r}", line, col)


# ---------------------------------------------------------------------------
# Parser

@dataclass(frozen=True)
class AnnotatedFormula:
    name: str
    role: str
    formula: Formula
    line: int


@dataclass(frozen=True)
class Include:
    path: str
    line: int


class _Parser:
    def __init__(self, source: str):
        self.tokens = list(tokenize(source))
        self.pos = 0

    def _peek(self) -> Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _at_end_error(self) -> ParseError:
        if self.tokens:
            last = self.tokens[-1]
            return ParseError("unexpected end of input", last.line, last.column)
        return ParseError("unexpected end of input", 1, 1)

    def _next(self) -> Token:
        tok = self._peek()
        if tok is None:
            raise self._at_end_error()
        self.pos += 1
        return tok

    def _expect(self, kind: str) -> Token:
        tok = self._next()
        if tok.kind != kind:
            raise ParseError(f"expected {kind!r}, found {tok.text!r}", tok.line, tok.column)
        return tok

    # -- top level ----------------------------------------------------------

    def units(self) -> list[AnnotatedFormula | Include]:
        out: list[AnnotatedFormula | Include] = []
        while self._peek() is not None:
            out.append(self._unit())
        return out

    def _unit(self) -> AnnotatedFormula | Include:
        tok = self._next()
        if tok.kind != "lower":
            raise ParseError(f"expected 'fof' or 'include', found {tok.text!r}", tok.line, tok.column)
        if tok.text in ("tff", "thf", "cnf", "tcf", "tpi"):
            raise UnsupportedConstruct(f"{tok.text} inputs are not supported", tok.line, tok.column)
        if tok.text == "include":
            self._expect("(")
            path = self._expect("quoted")
            closing = self._next()
            if closing.kind == ",":
                raise UnsupportedConstruct("include with formula selection", closing.line, closing.column)
            if closing.kind != ")":
                raise ParseError(f"expected ')', found {closing.text!r}", closing.line, closing.column)
            self._expect(".")
            return Include(path.text, tok.line)
        if tok.text != "fof":
            raise ParseError(f"expected 'fof' or 'include', found {tok.text!r}", tok.line, tok.column)
        self._expect("(")
        name_tok = self._next()
        if name_tok.kind not in ("lower", "quoted", "int"):
            raise ParseError(f"invalid formula name {name_tok.text!r}", name_tok.line, name_tok.column)
        self._expect(",")
        role_tok = self._next()
        if role_tok.kind != "lower":
            raise ParseError(f"invalid role {role_tok.text!r}", role_tok.line, role_tok.column)
        self._expect(",")
        formula = self._formula()
        self._expect(")")
        self._expect(".")
        return AnnotatedFormula(name_tok.text, role_tok.text, formula, tok.line)

    # -- formulas -----------------------------------------------------------

    def _formula(self) -> Formula:
        left = self._or_expr()
        tok = self._peek()
        if tok is not None and tok.kind in ("=>", "<=>"):
            self._next()
            right = self._or_expr()
            trailing = self._peek()
            if trailing is not None and trailing.kind in ("=>", "<=>"):
                raise ParseError(
                    f"{tok.kind!r} is non-associative; parenthesize", trailing.line, trailing.column
                )
            return Implies(left, right) if tok.kind == "=>" else Iff(left, right)
        return left

    def _or_expr(self) -> Formula:
        node = self._and_expr()
        while (tok := self._peek()) is not None and tok.kind == "|":
            self._next()
            node = Or(node, self._and_expr())
        return node

    def _and_expr(self) -> Formula:
        node = self._unitary()
        while (tok := self._peek()) is not None and tok.kind == "&":
            self._next()
            node = And(node, self._unitary())
        return node

    def _unitary(self) -> Formula:
        tok = self._peek()
        if tok is None:
            raise self._at_end_error()
        if tok.kind in ("!", "?"):
            self._next()
            self._expect("[")
            variables = [self._variable()]
            while self._peek() is not None and self._peek().kind == ",":
                self._next()
                variables.append(self._variable())
            self._expect("]")
            self._expect(":")
            body = self._unitary()
            cls = Forall if tok.kind == "!" else Exists
            return cls(tuple(variables), body)
        if tok.kind == "~":
            self._next()
            return Not(self._unitary())
        if tok.kind == "(":
            self._next()
            inner = self._formula()
            self._expect(")")
            return inner
        return self._atom()

    def _variable(self) -> str:
        tok = self._next()
        if tok.kind != "upper":
            raise ParseError(f"expected a variable, found {tok.text!r}", tok.line, tok.column)
        return tok.text

    def _atom(self) -> Formula:
        first = self._peek()
        if first is None:
            raise self._at_end_error()
        term = self._term()
        tok = self._peek()
        if tok is not None and tok.kind in ("=", "!="):
            self._next()
            right = self._term()
            eq = Equals(term, right)
            return Not(eq) if tok.kind == "!=" else eq
        if isinstance(term, Var):
            raise ParseError(
                f"variable {term.name!r} cannot stand alone as a formula", first.line, first.column
            )
        return Atom(term.name, term.args)

    def _term(self) -> Term:
        tok = self._next()
        if tok.kind == "upper":
            return Var(tok.text)
        if tok.kind not in ("lower", "quoted", "int"):
            raise ParseError(f"expected a term, found {tok.text!r}", tok.line, tok.column)
        name = tok.text
        nxt = self._peek()
        if nxt is not None and nxt.kind == "(":
            self._next()
            args = [self._term()]
            while self._peek() is not None and self._peek().kind == ",":
                self._next()
                args.append(self._term())
            self._expect(")")
            return Func(name, tuple(args))
        return Func(name)


def parse_units(source: str) -> list[AnnotatedFormula | Include]:
    """Parse a whole source text into annotated formulas and includes."""
    return _Parser(source).units()


def parse_formula(source: str) -> Formula:
    """Parse a single bare formula (no fof wrapper). Used by tests and tools."""
    parser = _Parser(source)
    formula = parser._formula()
    if parser._peek() is not None:
        tok = parser._peek()
        raise ParseError(f"trailing input {tok.text!r}", tok.line, tok.column)
    return formula
