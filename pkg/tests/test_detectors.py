from fractions import Fraction

import networkx as nx
import pytest
from networkx.algorithms import isomorphism

from ramseychi.detectors import (
    Arbitrary, even_hole, find_induced, find_induced_bruteforce, induces, is_even_hole_free, is_free,
    is_induced_path, verify_embedding,
)
from ramseychi.errors import CapabilityError
from ramseychi.graph import (
    Broom, CocktailMulti, CompleteBipartite, Cycle, Empty, Graph, Path, Petersen, Random, enumerate_graphs, generate,
)

from . import oracles


def test_examples():
    C5 = generate(Cycle(5))
    emb = find_induced(C5, Path(4))
    assert emb is not None and verify_embedding(C5, Path(4), emb)
    assert find_induced(C5, Cycle(4)) is None
    assert find_induced(generate(Petersen()), CompleteBipartite(2, 2)) is None


def test_is_free_examples():
    assert not is_free(generate(Cycle(4)), [Path(5), CocktailMulti(2, 2)])
    assert is_free(generate(Cycle(5)), [Path(5)])
    tree = generate(Broom(8, 5))
    assert is_free(tree, [Cycle(k) for k in range(3, 14)])


def _nx_has_induced(G: Graph, P: Graph) -> bool:
    gm = isomorphism.GraphMatcher(oracles.to_nx(G), oracles.to_nx(P))
    return gm.subgraph_is_isomorphic()


@pytest.mark.parametrize("pattern", [Path(4), Path(5), Cycle(4), Cycle(5), Broom(3, 2), CocktailMulti(2, 2)])
def test_agrees_with_networkx(pattern):
    P = generate(pattern)
    for n in range(7):
        for G in enumerate_graphs(n):
            emb = find_induced(G, pattern)
            assert (emb is not None) == _nx_has_induced(G, P)
            if emb is not None:
                assert verify_embedding(G, pattern, emb)


def test_agrees_with_bruteforce_on_random():
    for seed in range(30):
        G = generate(Random(9, Fraction(1, 2), seed))
        for pattern in (Path(5), Cycle(5), Broom(3, 2)):
            a = find_induced(G, pattern)
            b = find_induced_bruteforce(G, pattern)
            assert (a is None) == (b is None)


def test_arbitrary_pattern_limit():
    with pytest.raises(CapabilityError):
        find_induced(generate(Empty(20)), Arbitrary(generate(Empty(13))))
    assert find_induced(generate(Empty(5)), Arbitrary(generate(Empty(3)))) is not None


def test_verify_embedding_rejects_non_induced():
    K3 = Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
    assert not verify_embedding(K3, Path(3), {0: 0, 1: 1, 2: 2})
    assert not induces(K3, [0, 1, 2], Path(3))
    assert is_induced_path(generate(Path(4)), [0, 1, 2, 3])
    assert not is_induced_path(generate(Cycle(4)), [0, 1, 2, 3])


def test_even_holes():
    assert even_hole(generate(Cycle(6))) is not None
    assert is_even_hole_free(generate(Cycle(5)))
    assert not is_even_hole_free(generate(CompleteBipartite(2, 2)))
    for G in enumerate_graphs(6):
        H = oracles.to_nx(G)
        expected = any(_nx_has_induced(G, generate(Cycle(k))) for k in (4, 6))
        assert is_even_hole_free(G) == (not expected), nx.to_graph6_bytes(H)
