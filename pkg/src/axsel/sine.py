"""Syntax-based SInE selection.

A symbol s may trigger an axiom A iff s occurs in A and
occ(s) <= tolerance * occ(s') for every symbol s' of A; with the default
tolerance 1 exactly the rarest symbols of A trigger it. Selection then
alternates: goal symbols are 0-step triggered, a triggered symbol
triggers its axioms at the next step, and every symbol of a triggered
axiom is triggered at that same step. Symbol names carry no meaning here;
only occurrence counts matter.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping

from .fol import Symbol
from .kb import Goal, KnowledgeBase
from .selection import SelectionEntry, SelectionResult
from .stats import SymbolStats


@dataclass(frozen=True)
class SineConfig:
    depth: int = 1
    tolerance: float = 1.0

    def __post_init__(self) -> None:
        if self.depth < 1:
            raise ValueError(f"depth must be >= 1, got {self.depth}")
        if self.tolerance < 1:
            raise ValueError(f"tolerance must be >= 1, got {self.tolerance}")


@dataclass(frozen=True)
class TriggerIndex:
    # symbol -> ids of the axioms it may trigger
    allowed: Mapping[Symbol, frozenset[str]]

    def axioms_triggered_by(self, symbol: Symbol) -> frozenset[str]:
        return self.allowed.get(symbol, frozenset())


def axiom_trigger_symbols(
    kb: KnowledgeBase, stats: SymbolStats, tolerance: float = 1.0
) -> dict[str, frozenset[Symbol]]:
    """Per-axiom triggering symbols: those within tolerance of the rarest."""
    out: dict[str, frozenset[Symbol]] = {}
    for axiom in kb:
        if not axiom.symbols:
            out[axiom.id] = frozenset()
            continue
        min_occ = min(stats.occ[s] for s in axiom.symbols)
        bound = tolerance * min_occ
        out[axiom.id] = frozenset(s for s in axiom.symbols if stats.occ[s] <= bound)
    return out


def build_trigger_index(
    kb: KnowledgeBase, stats: SymbolStats, config: SineConfig
) -> TriggerIndex:
    allowed: dict[Symbol, set[str]] = {}
    for axiom_id, triggers in axiom_trigger_symbols(kb, stats, config.tolerance).items():
        for sym in triggers:
            allowed.setdefault(sym, set()).add(axiom_id)
    return TriggerIndex({sym: frozenset(ids) for sym, ids in allowed.items()})


def trigger_fixpoint(
    kb: KnowledgeBase, goal: Goal, index: TriggerIndex, depth: int
) -> dict[str, int]:
    """Axiom id -> minimal trigger step, for steps 1..depth.

    Goal symbols unknown to the index simply trigger nothing.
    """
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    steps: dict[str, int] = {}
    triggered_syms: set[Symbol] = set(goal.symbols)
    frontier_syms = set(triggered_syms)
    for step in range(1, depth + 1):
        new_axioms: set[str] = set()
        for sym in frontier_syms:
            new_axioms |= index.axioms_triggered_by(sym)
        new_axioms -= steps.keys()
        if not new_axioms:
            break
        frontier_syms = set()
        for axiom_id in new_axioms:
            steps[axiom_id] = step
            frontier_syms |= kb.axiom(axiom_id).symbols
        frontier_syms -= triggered_syms
        triggered_syms |= frontier_syms
    return steps


def _ranked_entries(kb: KnowledgeBase, steps: dict[str, int]) -> tuple[SelectionEntry, ...]:
    ordered = sorted(steps, key=lambda aid: (steps[aid], kb.position(aid)))
    return tuple(SelectionEntry(aid, float(steps[aid])) for aid in ordered)


def sine_select(
    kb: KnowledgeBase,
    goal: Goal,
    index: TriggerIndex,
    depth: int,
    params: Mapping[str, Any] | None = None,
    strategy: str = "sine",
) -> SelectionResult:
    """All axioms m-step triggered for some m <= depth, ordered by
    (first trigger step, axiom source order)."""
    steps = trigger_fixpoint(kb, goal, index, depth)
    merged: dict[str, Any] = {"depth": depth}
    if params:
        merged.update(params)
    return SelectionResult(strategy=strategy, params=merged, entries=_ranked_entries(kb, steps))
