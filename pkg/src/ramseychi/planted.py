"""Seeded planted instances on which the tree pipeline can be watched end to end.

The hypotheses of the sparse-tree theorem need astronomically large graphs,
so these hosts are small and the pipeline runs in forced mode with an
explicit skeleton width.  Each instance is a star or a star of stars with
light random noise between the leaves.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .graph import Graph, Path, Star, generate

PLANTED_C = Fraction(49, 100)


@dataclass(frozen=True)
class PlantedInstance:
    host: Graph
    target: Graph
    width: Fraction
    c: Fraction
    t: int
    seed: int


def _noise(rng: random.Random, vertices: list[int], p: Fraction) -> list[tuple[int, int]]:
    out = []
    for i, u in enumerate(vertices):
        for v in vertices[i + 1:]:
            if rng.getrandbits(32) * p.denominator < p.numerator << 32:
                out.append((u, v))
    return out


def planted_star(seed: int, leaves: int = 48, extra: int = 12, noise=Fraction(1, 60),
                 arms: int = 3) -> PlantedInstance:
    """A centre (vertex 0) with ``leaves`` leaves plus ``extra`` loose vertices; target ``K_{1,arms}``."""
    rng = random.Random(seed)
    n = 1 + leaves + extra
    edges = [(0, i) for i in range(1, leaves + 1)]
    edges += _noise(rng, list(range(1, n)), Fraction(noise))
    return PlantedInstance(Graph.from_edges(n, edges), generate(Star(arms)), Fraction(leaves // 2),
                           PLANTED_C, 1, seed)


_TARGETS = {
    "path": lambda: generate(Path(5)),
    "short": lambda: generate(Path(4)),
    "fork": lambda: Graph.from_edges(5, [(0, 1), (0, 2), (1, 3), (1, 4)]),
}


def planted_double_star(seed: int, centres: int = 3, leaves: int = 210, noise=Fraction(1, 400),
                        target: str = "path") -> PlantedInstance:
    """``centres`` stars with ``leaves`` leaves each, all centres joined to a last vertex.

    The skeleton width is 2, so the depth-two target must have at most two
    children per node: ``P_5`` (``target="path"``), ``P_4`` (``"short"``) or
    the fork with edges 01, 02, 13, 14 (``"fork"``).
    """
    rng = random.Random(seed)
    n = centres * (leaves + 1) + 1
    top = n - 1
    edges = []
    leaf_list = []
    for i in range(centres):
        centre = i * (leaves + 1)
        edges.append((centre, top))
        for j in range(1, leaves + 1):
            edges.append((centre, centre + j))
            leaf_list.append(centre + j)
    edges += _noise(rng, leaf_list, Fraction(noise))
    F = _TARGETS[target]()
    return PlantedInstance(Graph.from_edges(n, edges), F, Fraction(2), PLANTED_C, 1, seed)


def planted_instances(count: int = 50, seed: int = 0) -> list[PlantedInstance]:
    """A fixed mix: mostly stars, every fifth a star of stars."""
    out = []
    for i in range(count):
        s = seed * 1000 + i
        if i % 5 == 4:
            out.append(planted_double_star(s, target=("path", "short", "fork")[(i // 5) % 3]))
        else:
            out.append(planted_star(s, arms=2 + i % 3))
    return out
