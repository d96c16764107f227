"""Induced-subgraph containment.

``find_induced`` is a backtracking embedder: pattern vertices are placed in
BFS order from a maximum-degree vertex, and each candidate set is the
intersection of host rows (for pattern edges) and complemented host rows
(for pattern non-edges) of the vertices already placed, so "induced" is
enforced while searching rather than checked afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Iterable, Sequence, Union

from .errors import CapabilityError, ParameterError
from .graph import (
    Broom,
    CocktailMulti,
    CompleteBipartite,
    Cycle,
    Graph,
    Path,
    bits,
    generate,
)

MAX_ARBITRARY_PATTERN = 12


@dataclass(frozen=True)
class Arbitrary:
    graph: Graph


PatternSpec = Union[Path, Cycle, Broom, CompleteBipartite, CocktailMulti, Arbitrary]


def pattern_graph(pattern: PatternSpec | Graph) -> Graph:
    if isinstance(pattern, Graph):
        return pattern
    if isinstance(pattern, Arbitrary):
        return pattern.graph
    if isinstance(pattern, (Path, Cycle, Broom, CompleteBipartite, CocktailMulti)):
        return generate(pattern)
    raise ParameterError("pattern", f"unsupported pattern {pattern!r}")


def _search_order(P: Graph) -> list[int]:
    order: list[int] = []
    placed = 0
    while len(order) < P.n:
        rest = [v for v in range(P.n) if not (placed >> v) & 1]
        start = max(rest, key=lambda v: (P.degree(v), -v))
        queue = [start]
        placed |= 1 << start
        while queue:
            v = queue.pop(0)
            order.append(v)
            for w in bits(P.rows[v] & ~placed):
                placed |= 1 << w
                queue.append(w)
    return order


def find_induced(host: Graph, pattern: PatternSpec | Graph) -> dict[int, int] | None:
    """An embedding ``pattern vertex -> host vertex`` of an induced copy, or None."""
    P = pattern_graph(pattern)
    if isinstance(pattern, Arbitrary) and P.n > MAX_ARBITRARY_PATTERN:
        raise CapabilityError(f"arbitrary patterns limited to {MAX_ARBITRARY_PATTERN} vertices")
    if P.n > host.n:
        return None
    if P.n == 0:
        return {}
    order = _search_order(P)
    # for each step: (earlier positions adjacent, earlier positions non-adjacent)
    plan = []
    for i, v in enumerate(order):
        adj = [j for j in range(i) if P.adjacent(v, order[j])]
        non = [j for j in range(i) if not P.adjacent(v, order[j])]
        plan.append((adj, non, P.degree(v)))
    hrows = host.rows
    full = host.full_mask
    image = [0] * P.n
    hdeg = [r.bit_count() for r in hrows]

    def go(i: int, used: int) -> bool:
        if i == P.n:
            return True
        adj, non, need = plan[i]
        cand = full & ~used
        for j in adj:
            cand &= hrows[image[j]]
        for j in non:
            cand &= ~hrows[image[j]]
        for x in bits(cand):
            if hdeg[x] < need:
                continue
            image[i] = x
            if go(i + 1, used | (1 << x)):
                return True
        return False

    if not go(0, 0):
        return None
    emb = {order[i]: image[i] for i in range(P.n)}
    if not verify_embedding(host, P, emb):  # pragma: no cover - structural guarantee
        raise AssertionError("embedder produced a non-induced map")
    return dict(sorted(emb.items()))


def verify_embedding(host: Graph, pattern: PatternSpec | Graph, emb: dict[int, int]) -> bool:
    """Independent check that ``emb`` is an injective, adjacency-exact map."""
    P = pattern_graph(pattern)
    if sorted(emb) != list(range(P.n)):
        return False
    img = list(emb.values())
    if len(set(img)) != len(img) or any(not 0 <= x < host.n for x in img):
        return False
    for u, v in combinations(range(P.n), 2):
        if P.adjacent(u, v) != host.adjacent(emb[u], emb[v]):
            return False
    return True


def induces(host: Graph, vertices: Sequence[int], pattern: PatternSpec | Graph) -> bool:
    """Whether ``host[vertices]`` is isomorphic to the pattern (any bijection)."""
    P = pattern_graph(pattern)
    vs = list(vertices)
    if len(set(vs)) != len(vs) or len(vs) != P.n:
        return False
    return find_induced(host.induced(vs), P) is not None


def is_free(host: Graph, patterns: Iterable[PatternSpec | Graph]) -> bool:
    return all(find_induced(host, p) is None for p in patterns)


def find_induced_bruteforce(host: Graph, pattern: PatternSpec | Graph) -> dict[int, int] | None:
    """Exhaustive oracle over all ordered ``|pattern|``-tuples (small hosts only)."""
    P = pattern_graph(pattern)
    for combo in combinations(range(host.n), P.n):
        for perm in permutations(combo):
            emb = dict(enumerate(perm))
            if verify_embedding(host, P, emb):
                return emb
    return None


def is_induced_path(G: Graph, vertices: Sequence[int]) -> bool:
    """``vertices`` in this order form an induced path."""
    vs = list(vertices)
    if len(set(vs)) != len(vs) or any(not 0 <= v < G.n for v in vs):
        return False
    for i, j in combinations(range(len(vs)), 2):
        if G.adjacent(vs[i], vs[j]) != (j == i + 1):
            return False
    return True


def even_hole(G: Graph) -> dict[int, int] | None:
    """An induced even cycle of length at least 4, or None."""
    for k in range(4, G.n + 1, 2):
        emb = find_induced(G, Cycle(k))
        if emb is not None:
            return emb
    return None


def is_even_hole_free(G: Graph) -> bool:
    return even_hole(G) is None
