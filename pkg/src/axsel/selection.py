"""Ranked selection results shared by every strategy."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterator


@dataclass(frozen=True)
class SelectionEntry:
    axiom_id: str
    # Strategy-specific rank metadata: minimal trigger step for the
    # trigger-based strategies, cosine similarity for vector selection.
    score: float
    # For union strategies: "sine", "vector" or "both". Empty otherwise.
    origin: str = ""


@dataclass(frozen=True)
class SelectionResult:
    strategy: str
    params: dict[str, Any] = field(default_factory=dict)
    entries: tuple[SelectionEntry, ...] = ()

    def ids(self) -> list[str]:
        return [entry.axiom_id for entry in self.entries]

    def id_set(self) -> frozenset[str]:
        return frozenset(entry.axiom_id for entry in self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[SelectionEntry]:
        return iter(self.entries)

    def __contains__(self, axiom_id: str) -> bool:
        return any(entry.axiom_id == axiom_id for entry in self.entries)
