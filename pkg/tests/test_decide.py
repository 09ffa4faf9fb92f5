import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phrg import fixtures
from phrg.automata import DFA, dfa_for_word, length_dfa
from phrg.decide import (
    emptiness,
    intersect_regular,
    is_empty,
    is_member,
    label_set_successors,
    labels_of,
    membership,
    reachable_label_sets,
)
from phrg.grammar import PHRGrammar, derive, enumerate_language
from phrg.hypergraph import Hypergraph, str_of
from phrg.strings import string_language


def test_emptiness_verdicts():
    assert is_empty(fixtures.dead())
    for g in (fixtures.doubling(), fixtures.fbt(), fixtures.sierpinski(), fixtures.pow2()):
        assert not is_empty(g)


def test_emptiness_witness_is_a_real_label_trace():
    e = emptiness(fixtures.fbt())
    assert not e.empty
    assert e.witness[0] == (None, frozenset({"S"}))
    assert all(x <= {"□"} for x in [e.witness[-1][1]])
    assert e.explain()[0].startswith("start")


def test_pruning_does_not_change_verdicts():
    for g in (fixtures.dead(), fixtures.fbt(), fixtures.sierpinski()):
        assert is_empty(g, prune=True) == is_empty(g, prune=False)


def test_label_set_successors_by_hand():
    g = fixtures.fbt()
    assert label_set_successors({"S"}, 1, g) == {frozenset(), frozenset({"X"})}
    succ = label_set_successors({"X"}, 1, g)
    assert frozenset({"□"}) in succ and frozenset({"Y", "X"}) in succ


def test_label_set_successors_unknown_label():
    with pytest.raises(KeyError):
        label_set_successors({"nope"}, 1, fixtures.fbt())


def test_reachable_label_sets_cover_derivations():
    g = fixtures.fbt()
    sets = reachable_label_sets(g)
    for k in range(1, 4):
        for h in derive(g.start_graph(), [1] * k, g, max_edges=20):
            assert labels_of(h) in sets


@pytest.mark.parametrize("n", range(1, 11))
def test_membership_pow2(n):
    assert is_member(fixtures.pow2(), ("a",) * n) == (n in (1, 2, 4, 8))


def test_membership_explanation():
    ok, note, e = membership(fixtures.pow2(), ("b",))
    assert not ok and "letter" in note or "alphabet" in note


def test_intersection_with_length_bound():
    g = fixtures.pow2()
    gi = intersect_regular(g, length_dfa(["a"], 5))
    assert string_language(gi, 8, max_steps=10) == {("a",), ("a", "a"), ("a",) * 4}


def test_intersection_with_even_length():
    g = fixtures.pow2()
    even = DFA(("e", "o"), ("a",), {("e", "a"): "o", ("o", "a"): "e"}, "e", frozenset({"e"}))
    gi = intersect_regular(g, even)
    assert string_language(gi, 8, max_steps=12) == {("a",) * 2, ("a",) * 4, ("a",) * 8}


def test_intersection_type2_requirement():
    # sierpinski has type 3 labels
    with pytest.raises(Exception):
        intersect_regular(fixtures.sierpinski(), dfa_for_word("ab"))
