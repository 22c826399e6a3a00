"""Embedding-widened trigger selection."""

import io
import random

import pytest

from axsel.embeddings import KTooLarge, load_embedding
from axsel.kb import KnowledgeBase
from axsel.mapping import SymbolMapping, build_mapping
from axsel.simsine import SimSineConfig, build_sim_trigger_index, similarity_sine_select
from axsel.sine import SineConfig, build_trigger_index, sine_select
from axsel.stats import compute_stats

from helpers import axiom_from_symbols, goal_from_symbols, random_goal, random_kb

# dog and puppy are near, car is far from both
EMBEDDING = """\
dog 10 1 0
puppy 9 2 0
car 0 1 10
animal 7 5 1
wheel 1 0 9
"""


def _store():
    return load_embedding(io.StringIO(EMBEDDING))


def _kb():
    return KnowledgeBase(
        [
            axiom_from_symbols("dog_ax", ["dog"]),
            axiom_from_symbols("puppy_ax", ["puppy"]),
            axiom_from_symbols("car_ax", ["car"]),
        ]
    )


class TestEnhancedIndex:
    def test_neighbor_symbol_triggers_extra_axiom(self):
        kb = _kb()
        stats = compute_stats(kb)
        store = _store()
        mapping = build_mapping(kb, store)
        config = SimSineConfig(depth=1, tolerance=1.0, k=1)
        index = build_sim_trigger_index(kb, stats, store, mapping, config)
        goal = goal_from_symbols(["dog"])
        selected = similarity_sine_select(kb, goal, index, 1)
        # puppy is dog's nearest token, so the puppy axiom joins at step 1
        assert selected.ids() == ["dog_ax", "puppy_ax"]
        assert selected.strategy == "simsine"
        plain = sine_select(kb, goal, build_trigger_index(kb, stats, SineConfig(1, 1.0)), 1)
        assert plain.ids() == ["dog_ax"]

    def test_empty_mapping_behaves_like_plain_selection(self):
        kb = _kb()
        stats = compute_stats(kb)
        store = _store()
        empty = SymbolMapping([], coverage=0.0)
        config = SimSineConfig(depth=2, tolerance=1.0, k=2)
        enhanced = build_sim_trigger_index(kb, stats, store, empty, config)
        plain = build_trigger_index(kb, stats, SineConfig(2, 1.0))
        for goal_syms in (["dog"], ["car"], ["dog", "car"], ["nothing"]):
            goal = goal_from_symbols(goal_syms)
            assert (
                similarity_sine_select(kb, goal, enhanced, 2).id_set()
                == sine_select(kb, goal, plain, 2).id_set()
            )

    def test_neighbors_mapping_to_no_symbol_change_nothing(self):
        # KB only uses car; dog/puppy vectors exist but map back to nothing
        kb = KnowledgeBase([axiom_from_symbols("car_ax", ["car"])])
        stats = compute_stats(kb)
        store = _store()
        mapping = build_mapping(kb, store)
        config = SimSineConfig(depth=1, tolerance=1.0, k=2)
        index = build_sim_trigger_index(kb, stats, store, mapping, config)
        plain = build_trigger_index(kb, stats, SineConfig(1, 1.0))
        assert index.allowed == dict(plain.allowed)

    def test_k_bounded_by_vocabulary(self):
        kb = _kb()
        stats = compute_stats(kb)
        store = _store()
        mapping = build_mapping(kb, store)
        with pytest.raises(KTooLarge):
            build_sim_trigger_index(kb, stats, store, mapping, SimSineConfig(1, 1.0, k=5))

    def test_config_validation(self):
        with pytest.raises(ValueError):
            SimSineConfig(depth=0, tolerance=1.0, k=1)
        with pytest.raises(ValueError):
            SimSineConfig(depth=1, tolerance=1.0, k=0)


class TestSupersetLaw:
    def test_always_selects_superset_of_plain(self):
        rng = random.Random(11)
        for _ in range(20):
            kb = random_kb(rng, max_axioms=20, max_symbols=10)
            stats = compute_stats(kb)
            tokens = sorted(kb.symbols())
            rows = [[rng.randint(-5, 5) or 1 for _ in range(3)] for _ in tokens]
            store = load_embedding(
                io.StringIO("".join(f"{t} {' '.join(map(str, r))}\n" for t, r in zip(tokens, rows)))
            )
            mapping = build_mapping(kb, store)
            goal = random_goal(rng, kb)
            if len(store) < 2:
                continue
            for k in (1, 2):
                config = SimSineConfig(depth=3, tolerance=1.5, k=min(k, len(store) - 1))
                enhanced = build_sim_trigger_index(kb, stats, store, mapping, config)
                plain = build_trigger_index(kb, stats, SineConfig(3, 1.5))
                assert (
                    sine_select(kb, goal, plain, 3).id_set()
                    <= similarity_sine_select(kb, goal, enhanced, 3).id_set()
                )
