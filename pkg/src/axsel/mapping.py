"""KB symbol to embedding token mapping.

Two mapping sources exist. Brute-force normalization rewrites a symbol
name into a plausible vocabulary token (strip ontology prefixes and
suffixes, split camelcase, lowercase). Lexical tables supply curated
pairs from synonym, hyponym, or instance relations. When several
candidates land in the vocabulary the strongest source wins:
bruteforce, then synonym, then hyponym, then instance.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from typing import IO, Iterable, Mapping, Sequence

from .embeddings import EmbeddingStore
from .errors import AxselError
from .fol import Symbol
from .kb import KnowledgeBase

SOURCE_PRIORITY = {"bruteforce": 0, "synonym": 1, "hyponym": 2, "instance": 3}


class MappingError(AxselError):
    pass


class UnknownSource(MappingError):
    pass


class MappingParseError(MappingError):
    pass


class TokenNotInVocabulary(MappingError):
    pass


_CAMEL_RE = re.compile(r"[A-Z]+(?=[A-Z][a-z])|[A-Z]?[a-z0-9]+|[A-Z]+|[0-9]+")


@dataclass(frozen=True)
class NormalizationRules:
    """Configured prefix and suffix inventory for brute-force normalization."""

    prefixes: tuple[str, ...] = ("c__", "p__", "f__", "r__", "s__")
    suffixes: tuple[str, ...] = ("_fn", "_function")

    def normalize(self, name: str) -> str:
        stem = name
        for prefix in self.prefixes:
            if stem.startswith(prefix) and len(stem) > len(prefix):
                stem = stem[len(prefix):]
                break
        stem = self._strip_suffix(stem)
        words: list[str] = []
        for chunk in stem.split("_"):
            words.extend(_CAMEL_RE.findall(chunk))
        candidate = "_".join(w.lower() for w in words) or stem.lower()
        # Suffixes like _fn only surface after camelcase splitting
        # (MeasureFn -> measure_fn), so strip once more.
        return self._strip_suffix(candidate)

    def _strip_suffix(self, name: str) -> str:
        for suffix in self.suffixes:
            if name.endswith(suffix) and len(name) > len(suffix):
                return name[: -len(suffix)]
        return name


DEFAULT_RULES = NormalizationRules()


def brute_force_normalize(symbol: Symbol, rules: NormalizationRules = DEFAULT_RULES) -> str:
    """Normalized token candidate for a KB symbol name.

    The result is returned whether or not it occurs in any vocabulary;
    membership is the caller's concern.
    """
    return rules.normalize(symbol)


@dataclass(frozen=True)
class MappingEntry:
    kb_symbol: Symbol
    token: str
    source: str
    priority: int

    @classmethod
    def make(cls, kb_symbol: Symbol, token: str, source: str) -> "MappingEntry":
        if source not in SOURCE_PRIORITY:
            raise UnknownSource(f"unknown mapping source {source!r}")
        return cls(kb_symbol, token, source, SOURCE_PRIORITY[source])


class SymbolMapping:
    """Winning symbol -> token entries plus the exact inverse image."""

    def __init__(self, entries: Sequence[MappingEntry], coverage: float):
        forward: dict[Symbol, MappingEntry] = {}
        inverse: dict[str, set[Symbol]] = {}
        for entry in entries:
            if entry.kb_symbol in forward:
                raise MappingParseError(f"symbol {entry.kb_symbol!r} mapped twice")
            forward[entry.kb_symbol] = entry
            inverse.setdefault(entry.token, set()).add(entry.kb_symbol)
        self.entries: tuple[MappingEntry, ...] = tuple(entries)
        self.forward = forward
        self.inverse = {token: frozenset(syms) for token, syms in inverse.items()}
        self.coverage = coverage

    def __len__(self) -> int:
        return len(self.forward)

    def __contains__(self, symbol: Symbol) -> bool:
        return symbol in self.forward

    def token_for(self, symbol: Symbol) -> str | None:
        entry = self.forward.get(symbol)
        return entry.token if entry else None

    def map_symbols(self, symbols: Iterable[Symbol]) -> set[str]:
        """Forward image of the mapped subset; unmapped symbols dropped."""
        return {self.forward[s].token for s in symbols if s in self.forward}

    def inverse_lookup(self, token: str) -> frozenset[Symbol]:
        return self.inverse.get(token, frozenset())

    def digest(self) -> str:
        h = hashlib.sha256()
        for entry in self.entries:
            h.update(f"{entry.kb_symbol}\x00{entry.token}\x00{entry.source}\n".encode("utf-8"))
        return h.hexdigest()


def _check_tables(lexical_tables: Sequence[tuple[str, Mapping[Symbol, str]]]) -> None:
    for source, _ in lexical_tables:
        if source == "bruteforce":
            raise UnknownSource("bruteforce is computed, not supplied as a table")
        if source not in SOURCE_PRIORITY:
            raise UnknownSource(f"unknown mapping source {source!r}")


def build_mapping(
    kb: KnowledgeBase,
    store: EmbeddingStore,
    lexical_tables: Sequence[tuple[str, Mapping[Symbol, str]]] = (),
    rules: NormalizationRules = DEFAULT_RULES,
) -> SymbolMapping:
    """Map every KB symbol whose best candidate lands in the vocabulary.

    Candidates are the brute-force normalization plus one token per
    lexical table listing the symbol; the lowest-priority-number source
    wins, ties going to the earlier table in the list.
    """
    _check_tables(lexical_tables)
    symbols = sorted(kb.symbols())
    entries: list[MappingEntry] = []
    for symbol in symbols:
        best: MappingEntry | None = None
        candidate = rules.normalize(symbol)
        if candidate in store:
            best = MappingEntry.make(symbol, candidate, "bruteforce")
        else:
            for source, table in lexical_tables:
                token = table.get(symbol)
                if token is None or token not in store:
                    continue
                entry = MappingEntry.make(symbol, token, source)
                if best is None or entry.priority < best.priority:
                    best = entry
        if best is not None:
            entries.append(best)
    coverage = len(entries) / len(symbols) if symbols else 1.0
    return SymbolMapping(entries, coverage)


def write_mapping_tsv(mapping: SymbolMapping, out: IO[str]) -> None:
    out.write("kb_symbol\ttoken\tsource\n")
    for entry in mapping.entries:
        out.write(f"{entry.kb_symbol}\t{entry.token}\t{entry.source}\n")


def load_mapping_tsv(source: IO[str], store: EmbeddingStore, kb: KnowledgeBase) -> SymbolMapping:
    """Read a mapping file back, validating tokens against the vocabulary.

    Coverage is recomputed against the given KB: entries for symbols the
    KB never uses still load but do not count toward coverage.
    """
    entries: list[MappingEntry] = []
    for lineno, line in enumerate(source, start=1):
        line = line.rstrip("\n")
        if not line:
            continue
        fields = line.split("\t")
        if lineno == 1 and fields == ["kb_symbol", "token", "source"]:
            continue
        if len(fields) != 3:
            raise MappingParseError(f"line {lineno}: expected 3 tab-separated fields")
        kb_symbol, token, src = fields
        if src not in SOURCE_PRIORITY:
            raise UnknownSource(f"line {lineno}: unknown mapping source {src!r}")
        if token not in store:
            raise TokenNotInVocabulary(f"line {lineno}: token {token!r} not in vocabulary")
        entries.append(MappingEntry.make(kb_symbol, token, src))
    kb_symbols = kb.symbols()
    mapped = sum(1 for e in entries if e.kb_symbol in kb_symbols)
    coverage = mapped / len(kb_symbols) if kb_symbols else 1.0
    return SymbolMapping(entries, coverage)


def load_lexical_table(source: IO[str]) -> dict[Symbol, str]:
    """Two-column `symbol<TAB>token` file; first row per symbol wins."""
    table: dict[Symbol, str] = {}
    for lineno, line in enumerate(source, start=1):
        line = line.rstrip("\n")
        if not line:
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise MappingParseError(f"line {lineno}: expected 2 tab-separated fields")
        symbol, token = fields
        table.setdefault(symbol, token)
    return table
