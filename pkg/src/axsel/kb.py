"""Knowledge base and goal data model.

A knowledge base is an ordered list of named axioms with an inverted
symbol index. Source order is the global tiebreak order used by every
selection strategy. Both `KnowledgeBase` and `Goal` are immutable after
construction; any number of concurrent readers is safe.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Iterator

from .errors import AxselError
from .fol import Formula, Symbol, quote_name, symbols_of, to_tptp
from .tptp import AnnotatedFormula, Include, UnsupportedConstruct, parse_units


class DuplicateAxiomId(AxselError):
    pass


class NoConjecture(AxselError):
    pass


class MultipleConjectures(AxselError):
    pass


@dataclass(frozen=True)
class Axiom:
    id: str
    formula: Formula
    symbols: frozenset[Symbol]

    @classmethod
    def make(cls, axiom_id: str, formula: Formula) -> "Axiom":
        return cls(axiom_id, formula, symbols_of(formula))

    def to_tptp(self, role: str = "axiom") -> str:
        return f"fof({quote_name(self.id)}, {role}, {to_tptp(self.formula)})."


class KnowledgeBase:
    """Immutable indexed axiom collection."""

    def __init__(self, axioms: Iterable[Axiom]):
        self.axioms: tuple[Axiom, ...] = tuple(axioms)
        by_id: dict[str, Axiom] = {}
        position: dict[str, int] = {}
        index: dict[Symbol, set[str]] = {}
        for pos, axiom in enumerate(self.axioms):
            if axiom.id in by_id:
                raise DuplicateAxiomId(f"duplicate axiom id {axiom.id!r}")
            by_id[axiom.id] = axiom
            position[axiom.id] = pos
            for sym in axiom.symbols:
                index.setdefault(sym, set()).add(axiom.id)
        self._by_id = by_id
        self._position = position
        self.symbol_index: dict[Symbol, frozenset[str]] = {
            sym: frozenset(ids) for sym, ids in index.items()
        }

    def __len__(self) -> int:
        return len(self.axioms)

    def __iter__(self) -> Iterator[Axiom]:
        return iter(self.axioms)

    def __contains__(self, axiom_id: str) -> bool:
        return axiom_id in self._by_id

    def axiom(self, axiom_id: str) -> Axiom:
        return self._by_id[axiom_id]

    def position(self, axiom_id: str) -> int:
        """Source position; the global tiebreak order."""
        return self._position[axiom_id]

    def symbols(self) -> frozenset[Symbol]:
        """sym(KB): every predicate/function symbol occurring in some axiom."""
        return frozenset(self.symbol_index)

    def to_tptp(self) -> str:
        return "\n".join(a.to_tptp() for a in self.axioms) + ("\n" if self.axioms else "")

    def digest(self) -> str:
        """Stable content hash, used to key on-disk caches."""
        return hashlib.sha256(self.to_tptp().encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class Goal:
    """The implication F1 & ... & Fn => Q whose entailment is to be shown."""

    premises: tuple[Formula, ...]
    query: Formula
    symbols: frozenset[Symbol]
    name: str = "goal"
    premise_names: tuple[str, ...] = field(default=())

    @classmethod
    def make(
        cls,
        query: Formula,
        premises: Iterable[Formula] = (),
        name: str = "goal",
        premise_names: Iterable[str] = (),
    ) -> "Goal":
        premises = tuple(premises)
        names = tuple(premise_names)
        if not names:
            names = tuple(f"premise_{i + 1}" for i in range(len(premises)))
        syms: set[Symbol] = set(symbols_of(query))
        for premise in premises:
            syms |= symbols_of(premise)
        return cls(premises, query, frozenset(syms), name, names)

    def to_tptp(self) -> str:
        lines = [
            f"fof({quote_name(name)}, axiom, {to_tptp(premise)})."
            for name, premise in zip(self.premise_names, self.premises)
        ]
        lines.append(f"fof({quote_name(self.name)}, conjecture, {to_tptp(self.query)}).")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Parsing entry points

def _read(source: str | IO[str] | Path) -> str:
    if isinstance(source, Path):
        return source.read_text(encoding="utf-8")
    if isinstance(source, str):
        return source
    return source.read()


def _expand_includes(
    units: list[AnnotatedFormula | Include], include_base: Path | None
) -> list[AnnotatedFormula]:
    out: list[AnnotatedFormula] = []
    for unit in units:
        if isinstance(unit, Include):
            if include_base is None:
                raise UnsupportedConstruct(
                    "include directive without a base directory", unit.line, 1
                )
            text = (include_base / unit.path).read_text(encoding="utf-8")
            for inner in parse_units(text):
                if isinstance(inner, Include):
                    raise UnsupportedConstruct(
                        f"nested include in {unit.path!r}", inner.line, 1
                    )
                out.append(inner)
        else:
            out.append(unit)
    return out


def _check_role(unit: AnnotatedFormula) -> None:
    if unit.role not in ("axiom", "conjecture"):
        raise UnsupportedConstruct(f"unsupported formula role {unit.role!r}", unit.line, 1)


def parse_kb(source: str | IO[str] | Path, include_base: Path | None = None) -> KnowledgeBase:
    """Parse a stream of axiom-role formulas into a KnowledgeBase.

    Conjectures are rejected here: they belong in goal files.
    """
    if isinstance(source, Path) and include_base is None:
        include_base = source.parent
    units = _expand_includes(parse_units(_read(source)), include_base)
    axioms = []
    for unit in units:
        _check_role(unit)
        if unit.role == "conjecture":
            raise UnsupportedConstruct(
                f"conjecture {unit.name!r} not allowed in a knowledge base", unit.line, 1
            )
        axioms.append(Axiom.make(unit.name, unit.formula))
    return KnowledgeBase(axioms)


def parse_goal(source: str | IO[str] | Path, include_base: Path | None = None) -> Goal:
    """Parse a goal file: any number of axiom-role premises plus one conjecture."""
    if isinstance(source, Path) and include_base is None:
        include_base = source.parent
    units = _expand_includes(parse_units(_read(source)), include_base)
    premises: list[Formula] = []
    premise_names: list[str] = []
    conjectures: list[AnnotatedFormula] = []
    for unit in units:
        _check_role(unit)
        if unit.role == "conjecture":
            conjectures.append(unit)
        else:
            premises.append(unit.formula)
            premise_names.append(unit.name)
    if not conjectures:
        raise NoConjecture("goal source contains no conjecture")
    if len(conjectures) > 1:
        names = ", ".join(repr(c.name) for c in conjectures)
        raise MultipleConjectures(f"goal source contains multiple conjectures: {names}")
    conj = conjectures[0]
    return Goal.make(conj.formula, premises, name=conj.name, premise_names=premise_names)
