"""Slow, obviously-correct reference implementations used only by tests."""

from itertools import combinations, product

import networkx as nx

from ramseychi.graph import Graph


def to_nx(G: Graph) -> nx.Graph:
    H = nx.Graph()
    H.add_nodes_from(range(G.n))
    H.add_edges_from(G.edges())
    return H


def is_proper(G: Graph, colours) -> bool:
    return all(colours[u] != colours[v] for u, v in G.edges())


def chi(G: Graph) -> int:
    """Smallest k admitting a proper colouring, by plain backtracking."""
    if G.n == 0:
        return 0
    order = sorted(range(G.n), key=lambda v: -G.degree(v))
    for k in range(1, G.n + 1):
        col = {}

        def go(i):
            if i == len(order):
                return True
            v = order[i]
            used = {col[u] for u in G.neighbours(v) if u in col}
            for c in range(min(k, i + 1)):
                if c not in used:
                    col[v] = c
                    if go(i + 1):
                        return True
                    del col[v]
            return False

        if go(0):
            return k
    raise AssertionError("unreachable")


def omega(G: Graph) -> int:
    best = 0
    for r in range(G.n + 1):
        if any(all(G.adjacent(u, v) for u, v in combinations(S, 2)) for S in combinations(range(G.n), r)):
            best = r
        else:
            break
    return best


def alpha(G: Graph) -> int:
    return omega(G.complement())


def degeneracy(G: Graph) -> int:
    alive = set(range(G.n))
    best = 0
    while alive:
        v = min(alive, key=lambda x: (sum(1 for u in G.neighbours(x) if u in alive), x))
        best = max(best, sum(1 for u in G.neighbours(v) if u in alive))
        alive.remove(v)
    return best


def disconnected_after(G: Graph, S) -> bool:
    rest = [v for v in range(G.n) if v not in S]
    if len(rest) < 2:
        return False
    return not nx.is_connected(to_nx(G).subgraph(rest))


def a_connected(G: Graph, a: int) -> bool:
    """More than ``a`` vertices and no separating set of fewer than ``a`` vertices."""
    if G.n <= a:
        return False
    for r in range(a):
        for S in combinations(range(G.n), r):
            if disconnected_after(G, S):
                return False
    return True


def pair_count(G: Graph, A, B) -> int:
    return sum(1 for a in A for b in B if G.adjacent(a, b))


def ct_sparse(G: Graph, c, t: int) -> bool:
    """All pairs of subsets with sizes at least t (tiny graphs only)."""
    subsets = [S for r in range(t, G.n + 1) for S in combinations(range(G.n), r)]
    return all(pair_count(G, A, B) <= (1 - c) * len(A) * len(B) for A in subsets for B in subsets)


def graph6_reference(G: Graph) -> str:
    return nx.to_graph6_bytes(to_nx(G), header=False).decode().strip()


def rich_stable_sets(G: Graph, s: int, q: int):
    for S in combinations(range(G.n), s):
        if any(G.adjacent(u, v) for u, v in combinations(S, 2)):
            continue
        common = [v for v in range(G.n) if all(G.adjacent(v, x) for x in S)]
        if chi(G.induced(common)) > q:
            yield S


def all_colourings_fail(G: Graph, k: int) -> bool:
    return not any(is_proper(G, c) for c in product(range(k), repeat=G.n))
