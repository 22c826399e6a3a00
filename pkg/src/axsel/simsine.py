"""Similarity SInE: SInE triggering widened by embedding neighborhoods.

Each symbol that may trigger an axiom under plain SInE is joined by the
KB symbols whose mapped tokens sit among the k nearest neighbors of its
own token. The step fixpoint itself is untouched, so with an empty
mapping (or neighbors that map back to nothing) this degenerates to
plain SInE, and it always selects a superset of it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping

from .embeddings import EmbeddingStore, KTooLarge, simwords
from .fol import Symbol
from .kb import Goal, KnowledgeBase
from .mapping import SymbolMapping
from .selection import SelectionResult
from .sine import TriggerIndex, axiom_trigger_symbols, sine_select
from .stats import SymbolStats


@dataclass(frozen=True)
class SimSineConfig:
    depth: int = 1
    tolerance: float = 1.0
    k: int = 1

    def __post_init__(self) -> None:
        if self.depth < 1:
            raise ValueError(f"depth must be >= 1, got {self.depth}")
        if self.tolerance < 1:
            raise ValueError(f"tolerance must be >= 1, got {self.tolerance}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")


def build_sim_trigger_index(
    kb: KnowledgeBase,
    stats: SymbolStats,
    store: EmbeddingStore,
    mapping: SymbolMapping,
    config: SimSineConfig,
) -> TriggerIndex:
    """Trigger index whose per-axiom symbol sets are embedding-enhanced.

    Unmapped triggering symbols contribute only themselves; mapped ones
    additionally contribute every KB symbol reachable through the k
    nearest vocabulary tokens of their own token.
    """
    if config.k >= len(store):
        raise KTooLarge(f"k={config.k} out of range for a vocabulary of {len(store)} tokens")
    base = axiom_trigger_symbols(kb, stats, config.tolerance)
    neighbor_cache: dict[str, frozenset[Symbol]] = {}

    def neighbors(token: str) -> frozenset[Symbol]:
        cached = neighbor_cache.get(token)
        if cached is None:
            syms: set[Symbol] = set()
            for hit in simwords(store, token, config.k):
                syms |= mapping.inverse_lookup(hit.token)
            cached = frozenset(syms)
            neighbor_cache[token] = cached
        return cached

    allowed: dict[Symbol, set[str]] = {}
    for axiom_id, triggers in base.items():
        enhanced = set(triggers)
        for sym in triggers:
            token = mapping.token_for(sym)
            if token is not None:
                enhanced |= neighbors(token)
        for sym in enhanced:
            allowed.setdefault(sym, set()).add(axiom_id)
    return TriggerIndex({sym: frozenset(ids) for sym, ids in allowed.items()})


def similarity_sine_select(
    kb: KnowledgeBase,
    goal: Goal,
    index: TriggerIndex,
    depth: int,
    params: Mapping[str, Any] | None = None,
) -> SelectionResult:
    """Step-bounded selection over an enhanced index; same fixpoint as SInE."""
    return sine_select(kb, goal, index, depth, params=params, strategy="simsine")
