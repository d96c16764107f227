from fractions import Fraction
from itertools import combinations

import pytest

from ramseychi.errors import CapabilityError, ParameterError
from ramseychi.graph import (
    Blowup, Complete, CompleteBipartite, Cycle, Empty, Graph, Path, Petersen, Random, enumerate_graphs, generate,
)
from ramseychi.invariants import (
    DEFAULT_CHI_BUDGET, chromatic_number, edge_pair_count, exact_invariants, is_a_connected, is_ct_sparse, is_eps_chi_dense,
    optimal_colouring, ramsey, set_chi_budget, vertex_connectivity,
)

from . import oracles


def test_c5_and_k33():
    assert tuple(exact_invariants(generate(Cycle(5)))) == (3, 2, 2, 2)
    assert tuple(exact_invariants(generate(CompleteBipartite(3, 3)))) == (2, 2, 3, 3)


def test_invariants_match_oracle_on_small_corpus():
    for n in range(7):
        for G in enumerate_graphs(n):
            inv = exact_invariants(G)
            assert inv.chi == oracles.chi(G)
            assert inv.omega == oracles.omega(G)
            assert inv.alpha == oracles.alpha(G)
            assert inv.degeneracy == oracles.degeneracy(G)


def test_random_graphs_match_oracle():
    for seed in range(15):
        G = generate(Random(11, Fraction(1, 2), seed))
        assert chromatic_number(G) == oracles.chi(G)
        assert oracles.is_proper(G, optimal_colouring(G))


def test_blowup_c5_chi():
    # frozen: chi(C5[C5]) = ceil(15/2) = 8 by the lexicographic-product formula for odd cycles
    G = generate(Blowup(Cycle(5), 2))
    chi = chromatic_number(G)
    assert chi == 8
    assert chi >= -(-G.n // 4)
    col = optimal_colouring(G)
    assert oracles.is_proper(G, col) and len(set(col)) == 8


def test_chi_budget_is_capability_error():
    # clique bound 4 and chi 8, so the search cannot stop at the root
    set_chi_budget(5)
    try:
        with pytest.raises(CapabilityError):
            chromatic_number(generate(Blowup(Cycle(5), 2)).relabel(list(range(24, -1, -1))))
    finally:
        set_chi_budget(DEFAULT_CHI_BUDGET)


def test_connectivity_examples():
    assert is_a_connected(generate(Cycle(5)), 2)
    v = is_a_connected(generate(Path(4)), 2)
    assert not v and len(v.cutset) == 1
    assert oracles.disconnected_after(generate(Path(4)), v.cutset)
    v = is_a_connected(generate(Cycle(5)), 3)
    assert not v and len(v.cutset) == 2
    assert oracles.disconnected_after(generate(Cycle(5)), v.cutset)


def test_connectivity_matches_oracle():
    for n in range(7):
        for G in enumerate_graphs(n):
            for a in range(1, 5):
                v = is_a_connected(G, a)
                assert bool(v) == oracles.a_connected(G, a)
                if not v and v.cutset and G.n > a:
                    assert len(v.cutset) < a
                    assert oracles.disconnected_after(G, v.cutset)
    assert vertex_connectivity(generate(Petersen())) == 3


def test_ramsey_values():
    r = ramsey(2, 7)
    assert (r.value, r.exactness) == (7, "Exact")
    r = ramsey(3, 3)
    assert (r.value, r.exactness) == (6, "Exact")
    r = ramsey(5, 5)
    assert (r.value, r.exactness) == (70, "UpperBound")
    assert ramsey(4, 3).value == 9


def test_ramsey_3_3_derivation():
    # every 6-vertex graph has a triangle or a stable triple; C5 has neither
    for G in enumerate_graphs(6):
        assert oracles.omega(G) >= 3 or oracles.alpha(G) >= 3
    C5 = generate(Cycle(5))
    assert oracles.omega(C5) < 3 and oracles.alpha(C5) < 3


def test_edge_pair_count():
    K2, K3 = generate(Complete(2)), generate(Complete(3))
    assert edge_pair_count(K2, [0, 1], [0, 1]) == 2
    assert edge_pair_count(K3, [0, 1], [1, 2]) == 3
    for n in range(1, 7):
        assert edge_pair_count(generate(Complete(n)), range(n), range(n)) == n * (n - 1)


def test_sparseness_examples():
    v = is_ct_sparse(generate(Complete(5)), Fraction(1, 4), 2)
    assert not v.sparse
    K5 = generate(Complete(5))
    assert len(v.A) >= 2 and len(v.B) >= 2
    assert v.count == edge_pair_count(K5, v.A, v.B) > Fraction(3, 4) * len(v.A) * len(v.B)
    assert is_ct_sparse(generate(Empty(8)), Fraction(1, 4), 2).sparse
    # frozen: checked by the naive all-pairs oracle
    assert is_ct_sparse(generate(Petersen()), Fraction(1, 8), 6).sparse
    assert oracles.ct_sparse(generate(Petersen()), Fraction(1, 8), 6)


def test_sparseness_matches_oracle():
    for n in range(6):
        for G in enumerate_graphs(n):
            for c, t in ((Fraction(1, 4), 1), (Fraction(1, 3), 2), (Fraction(1, 8), 3)):
                assert is_ct_sparse(G, c, t).sparse == oracles.ct_sparse(G, c, t)


def test_sparseness_sampling_only_refutes():
    v = is_ct_sparse(generate(Complete(6)), Fraction(1, 4), 2, mode="sample", samples=50)
    assert not v.sparse
    v = is_ct_sparse(generate(Empty(6)), Fraction(1, 4), 2, mode="sample", samples=50)
    assert v.sparse and not v.exhaustive


def test_sparseness_parameters():
    with pytest.raises(ParameterError):
        is_ct_sparse(generate(Empty(3)), Fraction(1), 1)
    with pytest.raises(ParameterError):
        is_ct_sparse(generate(Empty(3)), Fraction(1, 4), 0)


def test_eps_chi_dense():
    for n in range(1, 7):
        assert is_eps_chi_dense(generate(Complete(n)), Fraction(1, 100))
    v = is_eps_chi_dense(generate(Cycle(5)), Fraction(1, 3))
    assert not v and v.chi_nonneighbours == 2
    assert is_eps_chi_dense(generate(Cycle(4)), Fraction(3, 4))
    assert not is_eps_chi_dense(generate(Petersen()), Fraction(1, 3))
