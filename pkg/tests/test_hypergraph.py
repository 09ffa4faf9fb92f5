import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phrg.errors import TypingError, UnknownLabel
from phrg.hypergraph import (
    Hypergraph,
    Signature,
    disjoint_union,
    find_morphism,
    handle,
    is_isomorphic,
    quotient,
    replace,
    str_of,
    string_graph,
)

LABELS = {"a": 2, "b": 2, "c": 1, "t": 3}


@st.composite
def hypergraphs(draw, max_nodes=5, max_edges=5):
    n = draw(st.integers(1, max_nodes))
    edges = []
    for _ in range(draw(st.integers(0, max_edges))):
        lab = draw(st.sampled_from(sorted(LABELS)))
        att = tuple(draw(st.integers(0, n - 1)) for _ in range(LABELS[lab]))
        edges.append((lab, att))
    ext = tuple(draw(st.lists(st.integers(0, n - 1), max_size=2)))
    return Hypergraph(n, tuple(edges), ext)


def brute_iso(g, h):
    if g.num_nodes != h.num_nodes or len(g.edges) != len(h.edges) or len(g.ext) != len(h.ext):
        return False
    target = sorted(h.edges)
    for p in itertools.permutations(range(g.num_nodes)):
        if tuple(p[v] for v in g.ext) != h.ext:
            continue
        if sorted((l, tuple(p[v] for v in att)) for l, att in g.edges) == target:
            return True
    return False


@settings(max_examples=150, deadline=None)
@given(hypergraphs(), st.randoms(use_true_random=False))
def test_key_invariant_under_renumbering(h, rnd):
    perm = list(range(h.num_nodes))
    rnd.shuffle(perm)
    edges = list(h.renumber(perm, h.num_nodes).edges)
    rnd.shuffle(edges)
    h2 = Hypergraph(h.num_nodes, tuple(edges), tuple(perm[v] for v in h.ext))
    assert h.key == h2.key
    assert is_isomorphic(h, h2)


@settings(max_examples=200, deadline=None)
@given(hypergraphs(max_nodes=4, max_edges=4), hypergraphs(max_nodes=4, max_edges=4))
def test_key_matches_brute_force_isomorphism(g, h):
    assert (g.key == h.key) == brute_iso(g, h)


def test_canonical_is_isomorphic_copy():
    h = Hypergraph.build(4, [("a", (3, 1)), ("t", (0, 1, 2)), ("c", (2,))], [3])
    c = h.canonical()
    assert c.key == h.key
    assert brute_iso(c, h)


def test_ext_order_matters():
    g = Hypergraph.build(2, [("a", (0, 1))], [0, 1])
    assert g.key != g.with_ext([1, 0]).key


def test_typing_errors():
    with pytest.raises(TypingError):
        Hypergraph.build(1, [("a", (0, 3))], [])
    sig = Signature({"a": 2})
    with pytest.raises(TypingError):
        Hypergraph.build(1, [("a", (0,))], []).check_typing(sig)
    with pytest.raises(UnknownLabel):
        sig.type_of("zz")


def test_handle_and_flags():
    h = handle("t", Signature(LABELS))
    assert h.ext == (0, 1, 2) and h.is_repetition_free() and h.is_proper() and h.is_well_formed()
    loop = Hypergraph.build(1, [("a", (0, 0))], [0, 0])
    assert not loop.is_proper() and not loop.is_repetition_free()
    assert not Hypergraph.build(2, [], [0]).is_well_formed()


@given(st.lists(st.sampled_from("ab"), max_size=6))
def test_string_graph_roundtrip(w):
    assert str_of(string_graph(w)) == tuple(w)


def test_str_of_rejects_non_strings():
    cyc = Hypergraph.build(2, [("a", (0, 1)), ("b", (1, 0))], [0, 1])
    assert str_of(cyc) is None
    assert str_of(handle("t", Signature(LABELS))) is None
    e = Hypergraph.build(3, [("a", (0, 1)), ("ε", (1, 2))], [0, 2])
    assert str_of(e, "ε") == ("a",)


@given(st.lists(st.sampled_from("ab"), min_size=1, max_size=4),
       st.lists(st.sampled_from("ab"), min_size=1, max_size=4),
       st.data())
def test_replace_splices_words(u, v, data):
    i = data.draw(st.integers(0, len(u) - 1))
    out = replace(string_graph(u), {i: string_graph(v)})
    assert str_of(out) == tuple(u[:i]) + tuple(v) + tuple(u[i + 1:])


def test_replace_merges_repeated_ext():
    # an edge replaced by a graph with ext (0, 0) glues its endpoints
    h = string_graph("ab")
    out = replace(h, {0: Hypergraph.build(1, [], [0, 0])})
    assert str_of(out) == ("b",)


def test_disjoint_union_and_quotient():
    u = disjoint_union(string_graph("a"), string_graph("b"))
    assert u.num_nodes == 4 and u.ext == (0, 1, 2, 3)
    q = quotient(u.with_ext([0, 3]), [(1, 2)])
    assert str_of(q) == ("a", "b")


def test_morphisms():
    path = string_graph("aa")
    edge = string_graph("a").with_ext([])
    m = find_morphism(edge, path, mode="injective", external_mode="subsequence")
    assert m is not None
    assert find_morphism(path, edge, mode="injective") is None
    assert find_morphism(path, path, mode="isomorphism") is not None
    with pytest.raises(ValueError):
        find_morphism(path, path, mode="nope")


def test_random_large_graph_key_stable():
    rnd = random.Random(7)
    n = 30
    edges = tuple(("a", (rnd.randrange(n), rnd.randrange(n))) for _ in range(60))
    h = Hypergraph(n, edges, (0,))
    perm = list(range(n))
    rnd.shuffle(perm)
    assert h.key == h.renumber(perm, n).key
