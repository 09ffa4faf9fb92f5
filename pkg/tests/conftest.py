import itertools

import pytest

from phrg import fixtures
from phrg.grammar import enumerate_language
from phrg.hypergraph import Hypergraph


def random_words(alphabet, max_len):
    for n in range(1, max_len + 1):
        yield from itertools.product(alphabet, repeat=n)


def bounded_keys(g, max_steps, max_edges):
    return enumerate_language(g, max_steps=max_steps, max_edges=max_edges).keys()


def permuted(h: Hypergraph, perm) -> Hypergraph:
    return h.renumber(perm, h.num_nodes)


@pytest.fixture(scope="session")
def fx():
    return fixtures
