"""Shared generators for randomized tests.

Integer-valued embedding vectors are used wherever a test demands exact
score agreement: products and sums of small integers are exact in
float64 no matter the summation order, so an independent oracle and the
numpy implementation produce bit-identical cosines.
"""

from __future__ import annotations

import random

import numpy as np

from axsel.embeddings import EmbeddingStore
from axsel.fol import And, Atom, Formula
from axsel.kb import Axiom, Goal, KnowledgeBase


def conjunction_of(symbols: list[str]) -> Formula:
    formula: Formula = Atom(symbols[0])
    for sym in symbols[1:]:
        formula = And(formula, Atom(sym))
    return formula


def axiom_from_symbols(axiom_id: str, symbols: list[str]) -> Axiom:
    return Axiom.make(axiom_id, conjunction_of(sorted(symbols)))


def goal_from_symbols(symbols: list[str]) -> Goal:
    return Goal.make(conjunction_of(sorted(symbols)))


def random_kb(
    rng: random.Random,
    max_axioms: int = 50,
    max_symbols: int = 20,
    max_axiom_size: int = 5,
) -> KnowledgeBase:
    n_symbols = rng.randint(2, max_symbols)
    pool = [f"s{i}" for i in range(n_symbols)]
    n_axioms = rng.randint(1, max_axioms)
    axioms = []
    for i in range(n_axioms):
        size = rng.randint(1, min(max_axiom_size, n_symbols))
        axioms.append(axiom_from_symbols(f"ax{i}", rng.sample(pool, size)))
    return KnowledgeBase(axioms)


def random_goal(rng: random.Random, kb: KnowledgeBase, extra_symbols: int = 2) -> Goal:
    pool = sorted(kb.symbols()) + [f"g{i}" for i in range(extra_symbols)]
    size = rng.randint(1, min(3, len(pool)))
    return goal_from_symbols(rng.sample(pool, size))


def random_int_vector(rng: random.Random, dim: int, bound: int = 9) -> list[int]:
    while True:
        vec = [rng.randint(-bound, bound) for _ in range(dim)]
        if any(vec):
            return vec


def random_int_store(
    rng: random.Random,
    n_tokens: int,
    dim: int,
    tie_rows: bool = True,
) -> EmbeddingStore:
    """Store with integer vectors; with tie_rows, some rows are copies or
    doublings of earlier rows so exact cosine ties occur."""
    tokens = [f"t{i}" for i in range(n_tokens)]
    rows = [random_int_vector(rng, dim)]
    for _ in range(1, n_tokens):
        if tie_rows and len(rows) >= 2 and rng.random() < 0.2:
            base = rows[rng.randrange(len(rows))]
            factor = rng.choice([1, 2])
            rows.append([factor * x for x in base])
        else:
            rows.append(random_int_vector(rng, dim))
    return EmbeddingStore(tokens, np.array(rows, dtype=np.float64))
