from fractions import Fraction

import pytest

from ramseychi.detectors import find_induced
from ramseychi.errors import CapabilityError, ParameterError
from ramseychi.extraction import (
    AlphaExceeds, HypothesisUnmet, InducedPathWitness, RichStableSet, Stalled, TreeEmbedding, broom_extract,
    cocktail_chain, f_identity_holds, f_sequence, find_rich_stable_set_bruteforce, gyarfas_extract, hc_subgraph,
    revalidate, rich_certificate, stablechi_extract, threshold,
)
from ramseychi.graph import (
    Broom, Complete, Cycle, Empty, Graph, Path, Petersen, Random, enumerate_graphs, generate,
)
from ramseychi.invariants import chromatic_number, is_a_connected

from . import oracles


def test_thresholds():
    assert threshold("CocktailKS", m=1, s=2, k=5, omega=2).value == 27
    assert threshold("Path2", s=2, k=5, q=1, omega=2).value == 120
    assert threshold("StableChi", s=2, q=0, alpha=2, omega=1).value == 4
    assert threshold("KappaChi", a=3).value == 11
    assert not threshold("CocktailKS", m=1, s=5, k=5, omega=4).exact
    with pytest.raises(ParameterError) as ei:
        threshold("Path2", s=2, k=4, q=1, omega=2)
    assert ei.value.field == "k"


def test_cocktail_chain_arithmetic():
    for s, k, w in ((2, 5, 1), (2, 5, 3), (3, 5, 2), (2, 6, 2)):
        ch = cocktail_chain(s, k, w, 6)
        assert all(ch.steps_ok) and ch.final_ok
        # the bound for m=1 is exactly R - 1
        assert ch.bounds[0] == ch.R - 1


def test_f_sequence_identity():
    f = f_sequence(500, 2, 1, 6, 8)
    assert f_identity_holds(f, 2, 1, 6)
    assert not f_identity_holds([f[0], f[1] + 1], 2, 1, 6)


def test_rich_stable_set_examples():
    C4 = generate(Cycle(4))
    cert = find_rich_stable_set_bruteforce(C4, 2, 0)
    assert cert == RichStableSet((0, 2), (1, 3), 1, 0)
    assert find_rich_stable_set_bruteforce(generate(Complete(5)), 2, 0) is None
    # frozen: least distance-two pair of the Petersen labelling, one common neighbour
    P = generate(Petersen())
    cert = find_rich_stable_set_bruteforce(P, 2, 0)
    assert cert == RichStableSet((0, 2), (1,), 1, 0)
    assert cert.S == next(oracles.rich_stable_sets(P, 2, 0))


def test_bruteforce_matches_oracle():
    for G in enumerate_graphs(6):
        for q in (0, 1):
            cert = find_rich_stable_set_bruteforce(G, 2, q)
            expect = next(oracles.rich_stable_sets(G, 2, q), None)
            assert (cert.S if cert else None) == expect


def test_hc_subgraph_examples():
    K6 = generate(Complete(6))
    assert hc_subgraph(K6, 2).vertices == tuple(range(6))
    assert hc_subgraph(generate(Cycle(5)), 1).vertices == tuple(range(5))
    two_k4 = Graph.from_edges(7, [(a, b) for a in range(4) for b in range(a + 1, 4)]
                              + [(a, b) for a in range(3, 7) for b in range(a + 1, 7)])
    res = hc_subgraph(two_k4, 1)
    block = two_k4.induced(res.vertices)
    assert len(res.vertices) == 4 and is_a_connected(block, 2) and chromatic_number(block) == 4


def test_hc_subgraph_guarantee_on_corpus():
    for G in enumerate_graphs(7):
        chi = chromatic_number(G)
        for a in (1, 2):
            try:
                res = hc_subgraph(G, a)
            except CapabilityError:
                pytest.fail("guaranteed object not found")
            if res is None:
                assert chi < 4 * a - 1
                continue
            F = G.induced(res.vertices)
            assert is_a_connected(F, a + 1)
            assert chromatic_number(F) == res.chi >= chi - 2 * a + 1


def test_stablechi_examples():
    r = stablechi_extract(generate(Empty(5)), 2, 1, a_opt=1)
    assert isinstance(r.certificate, AlphaExceeds) and r.certificate.a == 1
    assert revalidate(generate(Empty(5)), r.certificate)
    C4 = generate(Cycle(4))
    r = stablechi_extract(C4, 2, 1)
    assert isinstance(r.certificate, HypothesisUnmet)
    assert r.certificate.actual_chi == 2 and r.certificate.threshold.value == 7
    assert find_rich_stable_set_bruteforce(C4, 2, 1) is None
    with pytest.raises(ParameterError):
        stablechi_extract(Graph.empty(0), 2, 1)


def test_gyarfas_unforced_hypothesis():
    r = gyarfas_extract(generate(Complete(5)), 2, 1, 5)
    assert isinstance(r.certificate, HypothesisUnmet)
    # omega(K5) = 5 gives R(2,6) = 6 and threshold 4*(2 + 84 - 14) = 288
    assert r.certificate.actual_chi == 5 and r.certificate.threshold.value == 288


def test_gyarfas_forced_c4():
    C4 = generate(Cycle(4))
    r = gyarfas_extract(C4, 2, 1, 5, force=True)
    assert revalidate(C4, r.certificate, s=2)
    # neither a rich pair nor an induced P5 exists, so the forced run can only stall
    assert find_rich_stable_set_bruteforce(C4, 2, 1) is None and find_induced(C4, Path(5)) is None
    assert isinstance(r.certificate, Stalled)


def test_broom_examples():
    r = broom_extract(generate(Complete(4)), 3, 2, 2, 1)
    assert isinstance(r.certificate, HypothesisUnmet)
    B = generate(Broom(3, 2))
    r = broom_extract(B, 3, 2, 2, 1, force=True)
    assert isinstance(r.certificate, TreeEmbedding)
    assert revalidate(B, r.certificate)
    emb = dict(enumerate(r.certificate.mapping))
    assert find_induced(B.induced(sorted(emb.values())), Broom(3, 2)) is not None


def _cross_check(G, cert, s, q, k=None, broom=None):
    assert revalidate(G, cert, s=s)
    if isinstance(cert, RichStableSet):
        assert oracles.is_proper  # independent recount below
        common = [v for v in range(G.n) if all(G.adjacent(v, x) for x in cert.S) and v not in cert.S]
        assert oracles.chi(G.induced(common)) == cert.chi_common > q
        assert all(not G.adjacent(a, b) for a in cert.S for b in cert.S)
    elif isinstance(cert, InducedPathWitness):
        assert find_induced(G.induced(cert.vertices), Path(k)) is not None
    elif isinstance(cert, TreeEmbedding):
        assert find_induced(G.induced(cert.mapping), broom) is not None


def test_random_fuzz_small():
    for seed in range(60):
        G = generate(Random(12, Fraction(1, 2), seed))
        r = gyarfas_extract(G, 2, 1, 5, force=True)
        _cross_check(G, r.certificate, 2, 1, k=5)
        r = broom_extract(G, 3, 2, 2, 1, force=True)
        _cross_check(G, r.certificate, 2, 1, broom=Broom(3, 2))


def test_revalidate_rejects_forgeries():
    C4 = generate(Cycle(4))
    assert not revalidate(C4, RichStableSet((0, 1), (), 1, 0))
    assert not revalidate(C4, RichStableSet((0, 2), (1, 3), 2, 0))
    assert not revalidate(C4, InducedPathWitness((0, 1, 2, 3), 4))
    assert not revalidate(C4, AlphaExceeds(2, (0, 2, 1)))
