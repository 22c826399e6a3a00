"""First-order formula trees and symbol extraction.

The supported language is an untyped first-order fragment: quantifiers,
the connectives & | => <=> ~, predicate/function application and equality.
Formulas are immutable; two trees compare equal iff they are structurally
identical.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union

# Predicate and function symbols are plain strings; two symbols are the
# same iff their names are byte-identical.
Symbol = str


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class Var:
    """A variable. Never contributes to the symbol set of a formula."""

    name: str


@dataclass(frozen=True)
class Func:
    """Function application; constants are 0-ary functions."""

    name: str
    args: tuple["Term", ...] = ()


Term = Union[Var, Func]


# ---------------------------------------------------------------------------
# Formulas


@dataclass(frozen=True)
class Atom:
    """Predicate application."""

    pred: str
    args: tuple[Term, ...] = ()


@dataclass(frozen=True)
class Equals:
    """Logical equality. `=` is reserved and is not a KB symbol."""

    left: Term
    right: Term


@dataclass(frozen=True)
class Not:
    sub: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall:
    variables: tuple[str, ...]
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    variables: tuple[str, ...]
    body: "Formula"


Formula = Union[Atom, Equals, Not, And, Or, Implies, Iff, Forall, Exists]


# ---------------------------------------------------------------------------
# Symbol extraction


def _term_symbols(term: Term, out: set[Symbol]) -> None:
    if isinstance(term, Func):
        out.add(term.name)
        for arg in term.args:
            _term_symbols(arg, out)


def symbols_of(formula: Formula) -> frozenset[Symbol]:
    """All predicate and function symbols occurring in the formula.

    Constants count as 0-ary function symbols. Variables, connectives and
    the reserved equality sign are excluded.
    """
    out: set[Symbol] = set()
    stack: list[Formula] = [formula]
    while stack:
        node = stack.pop()
        if isinstance(node, Atom):
            out.add(node.pred)
            for arg in node.args:
                _term_symbols(arg, out)
        elif isinstance(node, Equals):
            _term_symbols(node.left, out)
            _term_symbols(node.right, out)
        elif isinstance(node, Not):
            stack.append(node.sub)
        elif isinstance(node, (And, Or, Implies, Iff)):
            stack.append(node.left)
            stack.append(node.right)
        elif isinstance(node, (Forall, Exists)):
            stack.append(node.body)
        else:
            raise TypeError(f"not a formula node: {node!r}")
    return frozenset(out)


# ---------------------------------------------------------------------------
# Serialization back to TPTP-style text

_PLAIN_NAME = re.compile(r"[a-z][a-zA-Z0-9_]*$|[0-9]+$")


def quote_name(name: str) -> str:
    """Quote a symbol or formula name unless it is a plain lower word."""
    if _PLAIN_NAME.fullmatch(name):
        return name
    escaped = name.replace("\\", "\\\\").replace("'", "\\'")
    return f"'{escaped}'"


def term_to_tptp(term: Term) -> str:
    if isinstance(term, Var):
        return term.name
    if not term.args:
        return quote_name(term.name)
    args = ",".join(term_to_tptp(a) for a in term.args)
    return f"{quote_name(term.name)}({args})"


def _flatten(node: Formula, cls: type) -> Iterator[Formula]:
    # Associative chains print without redundant nesting.
    if isinstance(node, cls):
        yield from _flatten(node.left, cls)
        yield from _flatten(node.right, cls)
    else:
        yield node


def to_tptp(formula: Formula) -> str:
    """Render a formula as TPTP-style text.

    Associative chains are printed flat and re-parse left-nested, so any
    tree the parser produced round-trips to an identical tree; hand-built
    right-nested chains come back as their left-nested equivalent.
    """
    if isinstance(formula, Atom):
        if not formula.args:
            return quote_name(formula.pred)
        args = ",".join(term_to_tptp(a) for a in formula.args)
        return f"{quote_name(formula.pred)}({args})"
    if isinstance(formula, Equals):
        return f"{term_to_tptp(formula.left)} = {term_to_tptp(formula.right)}"
    if isinstance(formula, Not):
        return f"~ {_unitary(formula.sub)}"
    if isinstance(formula, And):
        return "(" + " & ".join(_unitary(p) for p in _flatten(formula, And)) + ")"
    if isinstance(formula, Or):
        return "(" + " | ".join(_unitary(p) for p in _flatten(formula, Or)) + ")"
    if isinstance(formula, Implies):
        return f"({_unitary(formula.left)} => {_unitary(formula.right)})"
    if isinstance(formula, Iff):
        return f"({_unitary(formula.left)} <=> {_unitary(formula.right)})"
    if isinstance(formula, (Forall, Exists)):
        mark = "!" if isinstance(formula, Forall) else "?"
        variables = ",".join(formula.variables)
        return f"{mark} [{variables}] : {_unitary(formula.body)}"
    raise TypeError(f"not a formula node: {formula!r}")


def _unitary(formula: Formula) -> str:
    # Sub-formulas that are not self-delimiting get wrapped.
    text = to_tptp(formula)
    if isinstance(formula, (Forall, Exists, Equals)):
        return f"({text})"
    return text
