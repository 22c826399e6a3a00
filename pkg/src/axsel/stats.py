"""Occurrence counts and idf weights over a knowledge base.

occ(s) is the number of axioms containing s (multiplicity inside a single
axiom is ignored). idf(s) = ln(|KB| / occ(s)), so a symbol occurring in
every axiom has idf 0 and rarer symbols weigh more. The log base only
scales all idf values uniformly and cancels out of the weighted-mean
vector representation, so natural log is fixed here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import IO, Mapping

from .errors import AxselError
from .fol import Symbol
from .kb import KnowledgeBase


class EmptyKnowledgeBase(AxselError):
    pass


@dataclass(frozen=True)
class SymbolStats:
    occ: Mapping[Symbol, int]
    idf: Mapping[Symbol, float]
    kb_size: int


def compute_stats(kb: KnowledgeBase) -> SymbolStats:
    if len(kb) == 0:
        raise EmptyKnowledgeBase("cannot compute symbol statistics of an empty knowledge base")
    size = len(kb)
    occ = {sym: len(ids) for sym, ids in kb.symbol_index.items()}
    idf = {sym: math.log(size / count) for sym, count in occ.items()}
    return SymbolStats(occ=occ, idf=idf, kb_size=size)


def mean_idf(stats: SymbolStats) -> float:
    """Average idf over sym(KB); the weight assumed for goal symbols the KB
    has never seen."""
    if not stats.idf:
        raise EmptyKnowledgeBase("no symbols to average over")
    return sum(stats.idf.values()) / len(stats.idf)


def write_stats_tsv(stats: SymbolStats, out: IO[str]) -> None:
    """TSV rows `symbol<TAB>occ<TAB>idf`, most frequent first."""
    out.write("symbol\tocc\tidf\n")
    for sym in sorted(stats.occ, key=lambda s: (-stats.occ[s], s)):
        out.write(f"{sym}\t{stats.occ[sym]}\t{stats.idf[sym]:.10g}\n")
