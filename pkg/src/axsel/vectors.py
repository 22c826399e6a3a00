"""Vector-based axiom selection.

Every axiom becomes the idf-weighted mean of the embedding vectors of
its mapped symbols; rare symbols dominate the direction. Axioms whose
symbols all fail to map (or cancel to the zero vector) get no vector
and can never be selected this way. The goal is vectorized with the
same embedding and mapping; goal symbols the KB has never seen are
weighted with the mean KB idf. Selection is then an exact top-k cosine
scan, optionally unioned with a SInE selection.

Summation runs over symbols in sorted order so repeated runs produce
bit-identical vectors.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .embeddings import EmbeddingStore, KTooLarge
from .errors import AxselError
from .fol import Symbol
from .kb import Goal, KnowledgeBase
from .mapping import SymbolMapping
from .selection import SelectionEntry, SelectionResult
from .sine import TriggerIndex, sine_select
from .stats import SymbolStats, mean_idf


class GoalNotVectorizable(AxselError):
    pass


class CacheError(AxselError):
    pass


@dataclass(frozen=True, eq=False)
class AxiomVector:
    axiom_id: str
    # None when the axiom has no vector (nothing mapped, or the
    # weighted combination cancelled to zero).
    vector: np.ndarray | None

    @property
    def absent(self) -> bool:
        return self.vector is None


@dataclass(frozen=True, eq=False)
class GoalVector:
    vector: np.ndarray | None
    # Goal symbols that were mapped but do not occur in the KB; these
    # contributed with the mean KB idf as weight.
    unknown_symbol_count: int = 0

    @property
    def absent(self) -> bool:
        return self.vector is None


def _weighted_mean(
    symbols: Iterable[Symbol],
    stats: SymbolStats,
    store: EmbeddingStore,
    mapping: SymbolMapping,
    unknown_weight: float | None = None,
) -> tuple[np.ndarray | None, int]:
    """Idf-weighted mean of the mapped symbols' vectors.

    Returns (vector, unknown count). Unmapped symbols are dropped.
    Symbols outside the KB get unknown_weight, or are dropped too when
    it is None. A zero total weight falls back to the unweighted mean;
    a result that cancels to the zero vector counts as no vector.
    """
    rows: list[np.ndarray] = []
    weights: list[float] = []
    unknown = 0
    for symbol in sorted(symbols):
        token = mapping.token_for(symbol)
        if token is None:
            continue
        if symbol in stats.occ:
            weight = stats.idf[symbol]
        elif unknown_weight is not None:
            weight = unknown_weight
            unknown += 1
        else:
            continue
        rows.append(store.vector(token))
        weights.append(weight)
    if not rows:
        return None, unknown
    stacked = np.stack(rows)
    w = np.asarray(weights, dtype=np.float64)
    total = w.sum()
    if total == 0.0:
        vector = stacked.mean(axis=0)
    else:
        vector = (w[:, np.newaxis] * stacked).sum(axis=0) / total
    if not vector.any():
        return None, unknown
    return vector, unknown


class KbVectorIndex:
    """Per-axiom vectors in KB order, with the defined rows stacked for
    the cosine scan."""

    def __init__(self, entries: Sequence[AxiomVector]):
        self.entries: tuple[AxiomVector, ...] = tuple(entries)
        present_ids: list[str] = []
        present_rows: list[np.ndarray] = []
        for entry in self.entries:
            if entry.vector is not None:
                present_ids.append(entry.axiom_id)
                present_rows.append(entry.vector)
        self.present_ids: tuple[str, ...] = tuple(present_ids)
        if present_rows:
            self.matrix = np.stack(present_rows)
            self.norms = np.linalg.norm(self.matrix, axis=1)
        else:
            self.matrix = np.zeros((0, 0))
            self.norms = np.zeros(0)
        self.matrix.setflags(write=False)
        self.norms.setflags(write=False)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def present_count(self) -> int:
        return len(self.present_ids)

    @property
    def absent_count(self) -> int:
        return len(self.entries) - len(self.present_ids)


def vectorize_kb(
    kb: KnowledgeBase, stats: SymbolStats, store: EmbeddingStore, mapping: SymbolMapping
) -> KbVectorIndex:
    entries = []
    for axiom in kb:
        vector, _ = _weighted_mean(axiom.symbols, stats, store, mapping)
        entries.append(AxiomVector(axiom.id, vector))
    return KbVectorIndex(entries)


def vectorize_goal(
    goal: Goal, stats: SymbolStats, store: EmbeddingStore, mapping: SymbolMapping
) -> GoalVector:
    vector, unknown = _weighted_mean(
        goal.symbols, stats, store, mapping, unknown_weight=mean_idf(stats)
    )
    return GoalVector(vector, unknown)


def most_similar(
    index: KbVectorIndex,
    gv: GoalVector,
    k: int,
    params: Mapping[str, Any] | None = None,
) -> SelectionResult:
    """The k axioms with vectors closest in cosine to the goal vector,
    descending, ties broken by KB source order."""
    if gv.vector is None:
        raise GoalNotVectorizable("the goal has no vector under this mapping")
    if k < 0 or k > index.present_count:
        raise KTooLarge(
            f"k={k} out of range: only {index.present_count} axioms have vectors"
        )
    merged: dict[str, Any] = {"k": k}
    if params:
        merged.update(params)
    if k == 0:
        return SelectionResult(strategy="vector", params=merged, entries=())
    gnorm = float(np.linalg.norm(gv.vector))
    scores = np.clip((index.matrix @ gv.vector) / (index.norms * gnorm), -1.0, 1.0)
    # Present rows keep KB order, so a stable sort realizes the tie rule.
    order = np.argsort(-scores, kind="stable")[:k]
    entries = tuple(
        SelectionEntry(index.present_ids[row], float(scores[row])) for row in order
    )
    return SelectionResult(strategy="vector", params=merged, entries=entries)


def vb_union_sine(
    kb: KnowledgeBase,
    goal: Goal,
    trigger_index: TriggerIndex,
    vector_index: KbVectorIndex,
    gv: GoalVector,
    depth: int,
    k: int,
    params: Mapping[str, Any] | None = None,
) -> SelectionResult:
    """Union of the SInE selection and the top-k vector selection.

    SInE entries come first in step order (scored by step, origin
    `sine` or `both`), then the vector hits not already present, in
    score order (scored by cosine, origin `vector`). A goal with no
    vector contributes an empty vector component.
    """
    sine_part = sine_select(kb, goal, trigger_index, depth)
    if gv.vector is None:
        vector_part = SelectionResult(strategy="vector", params={"k": k})
    else:
        vector_part = most_similar(vector_index, gv, k)
    sine_ids = sine_part.id_set()
    vector_ids = vector_part.id_set()
    entries: list[SelectionEntry] = []
    for entry in sine_part:
        origin = "both" if entry.axiom_id in vector_ids else "sine"
        entries.append(SelectionEntry(entry.axiom_id, entry.score, origin))
    for entry in vector_part:
        if entry.axiom_id not in sine_ids:
            entries.append(SelectionEntry(entry.axiom_id, entry.score, "vector"))
    merged: dict[str, Any] = {"depth": depth, "k": k}
    if params:
        merged.update(params)
    return SelectionResult(strategy="vb-union", params=merged, entries=tuple(entries))


def cache_path(cache_dir: str | Path, kb_digest: str, store_digest: str, mapping_digest: str) -> Path:
    key = hashlib.sha256(f"{kb_digest}\n{store_digest}\n{mapping_digest}".encode("ascii")).hexdigest()
    return Path(cache_dir) / f"vectors-{key[:24]}.npz"


def save_index(index: KbVectorIndex, path: str | Path) -> None:
    ids = np.array([e.axiom_id for e in index.entries])
    present = np.array([not e.absent for e in index.entries], dtype=bool)
    np.savez_compressed(path, ids=ids, present=present, matrix=index.matrix)


def load_index(path: str | Path) -> KbVectorIndex:
    try:
        with np.load(path) as data:
            ids = data["ids"]
            present = data["present"]
            matrix = data["matrix"]
    except (OSError, KeyError, ValueError) as exc:
        raise CacheError(f"unreadable vector cache {path}: {exc}") from None
    if int(present.sum()) != matrix.shape[0]:
        raise CacheError(f"vector cache {path} is internally inconsistent")
    entries = []
    row = 0
    for axiom_id, has_vector in zip(ids, present):
        if has_vector:
            entries.append(AxiomVector(str(axiom_id), matrix[row]))
            row += 1
        else:
            entries.append(AxiomVector(str(axiom_id), None))
    return KbVectorIndex(entries)
