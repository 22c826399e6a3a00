"""Axiom selection for reasoning over large first-order knowledge bases.

Strategies: occurrence-based trigger selection (sine), its word-embedding
widened variant (simsine), idf-weighted vector selection (vector), and
the union of the first and third (vb-union).
"""

from .embeddings import (
    EmbeddingStore,
    KTooLarge,
    SimilarityHit,
    cos_sim,
    load_embedding,
    simwords,
    top_k_vectors,
)
from .errors import AxselError
from .kb import Axiom, Goal, KnowledgeBase, parse_goal, parse_kb
from .mapping import (
    NormalizationRules,
    SymbolMapping,
    brute_force_normalize,
    build_mapping,
)
from .selection import SelectionEntry, SelectionResult
from .simsine import SimSineConfig, build_sim_trigger_index, similarity_sine_select
from .sine import SineConfig, build_trigger_index, sine_select, trigger_fixpoint
from .stats import SymbolStats, compute_stats, mean_idf
from .vectors import (
    GoalNotVectorizable,
    KbVectorIndex,
    most_similar,
    vb_union_sine,
    vectorize_goal,
    vectorize_kb,
)

__version__ = "0.1.0"

__all__ = [
    "AxselError",
    "Axiom",
    "EmbeddingStore",
    "Goal",
    "GoalNotVectorizable",
    "KTooLarge",
    "KbVectorIndex",
    "KnowledgeBase",
    "NormalizationRules",
    "SelectionEntry",
    "SelectionResult",
    "SimilarityHit",
    "SimSineConfig",
    "SineConfig",
    "SymbolMapping",
    "SymbolStats",
    "brute_force_normalize",
    "build_mapping",
    "build_sim_trigger_index",
    "build_trigger_index",
    "compute_stats",
    "cos_sim",
    "load_embedding",
    "mean_idf",
    "most_similar",
    "parse_goal",
    "parse_kb",
    "sine_select",
    "similarity_sine_select",
    "simwords",
    "top_k_vectors",
    "trigger_fixpoint",
    "vb_union_sine",
    "vectorize_goal",
    "vectorize_kb",
]
