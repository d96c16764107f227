"""Simple undirected graphs stored as adjacency-row bitsets.

Vertex ``v`` of a :class:`Graph` is the integer ``v`` in ``range(n)`` and
``rows[v]`` is an ``int`` whose bit ``u`` is set iff ``uv`` is an edge.
Graphs are immutable and hashable, so they can key caches and be shared
between workers.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Iterator, Sequence

from .errors import CapabilityError, ParameterError

# exhaustive routines (chromatic number, cliques, enumeration) refuse beyond this
MAX_EXHAUSTIVE_N = 64


def bits(mask: int) -> Iterator[int]:
    """Yield the set bit positions of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def to_mask(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


@dataclass(frozen=True)
class Graph:
    n: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if self.n < 0 or len(self.rows) != self.n:
            raise ParameterError("n", f"row count {len(self.rows)} does not match n={self.n}")
        full = (1 << self.n) - 1
        for v, row in enumerate(self.rows):
            if row & ~full or (row >> v) & 1:
                raise ParameterError("adj", f"row {v} has a loop or out-of-range bit")
            for u in bits(row):
                if not (self.rows[u] >> v) & 1:
                    raise ParameterError("adj", f"adjacency not symmetric at ({v},{u})")

    # construction -------------------------------------------------------
    @classmethod
    def _trusted(cls, n: int, rows: tuple[int, ...]) -> "Graph":
        # skips validation; callers guarantee symmetric loop-free rows
        g = object.__new__(cls)
        object.__setattr__(g, "n", n)
        object.__setattr__(g, "rows", rows)
        return g

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        rows = [0] * n
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ParameterError("edges", f"edge ({u},{v}) out of range for n={n}")
            if u == v:
                raise ParameterError("edges", f"loop at {u}")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(n, tuple(rows))

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(n, (0,) * n)

    # queries ------------------------------------------------------------
    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def adjacent(self, u: int, v: int) -> bool:
        return bool((self.rows[u] >> v) & 1)

    def neighbours(self, v: int) -> list[int]:
        return list(bits(self.rows[v]))

    def degree(self, v: int) -> int:
        return self.rows[v].bit_count()

    def degrees(self) -> list[int]:
        return [r.bit_count() for r in self.rows]

    def num_edges(self) -> int:
        return sum(r.bit_count() for r in self.rows) // 2

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in bits(self.rows[u] >> (u + 1) << (u + 1))]

    def half_average_degree(self) -> Fraction:
        """``|E|/|V|``, one half of the average degree (0 for the null graph)."""
        if self.n == 0:
            return Fraction(0)
        return Fraction(self.num_edges(), self.n)

    def average_degree(self) -> Fraction:
        return 2 * self.half_average_degree()

    # derived graphs -----------------------------------------------------
    def complement(self) -> "Graph":
        full = self.full_mask
        return Graph(self.n, tuple(full & ~r & ~(1 << v) for v, r in enumerate(self.rows)))

    def induced(self, vertices: Iterable[int]) -> "Graph":
        """``G[S]`` relabelled to ``0..|S|-1`` preserving vertex order."""
        return self.induced_mask(self._checked_mask(vertices))

    def induced_mask(self, mask: int) -> "Graph":
        order = list(bits(mask))
        if not order:
            return Graph(0, ())
        if len(order) == self.n:
            return self
        pos = {v: i for i, v in enumerate(order)}
        rows = []
        for v in order:
            r = 0
            for u in bits(self.rows[v] & mask):
                r |= 1 << pos[u]
            rows.append(r)
        return Graph._trusted(len(order), tuple(rows))

    def remove(self, vertices: Iterable[int]) -> "Graph":
        """``G \\ S``."""
        return self.induced_mask(self.full_mask & ~self._checked_mask(vertices))

    def common_neighbourhood(self, vertices: Iterable[int]) -> list[int]:
        return list(bits(self.common_neighbourhood_mask(self._checked_mask(vertices))))

    def common_neighbourhood_mask(self, mask: int) -> int:
        """Intersection of ``N(v)`` over ``v`` in ``mask``; all of ``V(G)`` for an empty mask."""
        common = self.full_mask
        for v in bits(mask):
            common &= self.rows[v]
        return common

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Graph whose vertex ``perm[v]`` plays the role of ``v``."""
        rows = [0] * self.n
        for v in range(self.n):
            r = 0
            for u in bits(self.rows[v]):
                r |= 1 << perm[u]
            rows[perm[v]] = r
        return Graph._trusted(self.n, tuple(rows))

    def _checked_mask(self, vertices: Iterable[int]) -> int:
        m = 0
        for v in vertices:
            if not 0 <= v < self.n:
                raise ParameterError("S", f"vertex {v} out of range for n={self.n}")
            m |= 1 << v
        return m

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.num_edges()})"


def induced(G: Graph, S: Iterable[int]) -> Graph:
    return G.induced(S)


def common_neighbourhood(G: Graph, S: Iterable[int]) -> list[int]:
    """``⋂_{v∈S} N(v)``; the empty intersection is ``V(G)`` by convention."""
    return G.common_neighbourhood(S)


def disjoint_union(graphs: Sequence[Graph]) -> Graph:
    rows: list[int] = []
    offset = 0
    for g in graphs:
        rows.extend(r << offset for r in g.rows)
        offset += g.n
    return Graph(offset, tuple(rows))


def substitute(base: Graph, inner: Graph) -> Graph:
    """Replace every vertex of ``base`` by a copy of ``inner``.

    Copies of adjacent base vertices are complete to each other; vertex
    ``(b, h)`` gets index ``b * |inner| + h``.
    """
    m = inner.n
    block = (1 << m) - 1
    rows = []
    for b in range(base.n):
        outside = 0
        for b2 in bits(base.rows[b]):
            outside |= block << (b2 * m)
        for h in range(m):
            rows.append(outside | (inner.rows[h] << (b * m)))
    return Graph(base.n * m, tuple(rows))


# --------------------------------------------------------------------------
# graph families
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Path:
    k: int


@dataclass(frozen=True)
class Cycle:
    k: int


@dataclass(frozen=True)
class CompleteBipartite:
    s: int
    s2: int


@dataclass(frozen=True)
class Broom:
    k: int
    l: int


@dataclass(frozen=True)
class CocktailMulti:
    """Complement of ``m`` disjoint copies of ``K_s``."""

    m: int
    s: int


@dataclass(frozen=True)
class CompleteMultipartite:
    parts: tuple[int, ...]


@dataclass(frozen=True)
class Star:
    l: int


@dataclass(frozen=True)
class Complete:
    n: int


@dataclass(frozen=True)
class Empty:
    n: int


@dataclass(frozen=True)
class Blowup:
    base: "FamilySpec"
    depth: int


@dataclass(frozen=True)
class Random:
    n: int
    p: Fraction
    seed: int


@dataclass(frozen=True)
class Complement:
    inner: "FamilySpec"


@dataclass(frozen=True)
class DisjointUnion:
    parts: tuple["FamilySpec", ...]


@dataclass(frozen=True)
class Petersen:
    pass


FamilySpec = (
    Path | Cycle | CompleteBipartite | Broom | CocktailMulti | CompleteMultipartite | Star
    | Complete | Empty | Blowup | Random | Complement | DisjointUnion | Petersen
)


def _positive(field: str, value: int, minimum: int = 1) -> None:
    if not isinstance(value, int) or value < minimum:
        raise ParameterError(field, f"must be an integer >= {minimum}, got {value!r}")


def random_graph(n: int, p: Fraction, seed: int) -> Graph:
    """G(n, p) driven by Python's MT19937 (``random.Random(seed)``).

    Pairs ``(i, j)``, ``i < j``, are visited in lexicographic order; each
    draws 64 bits ``x`` and is an edge iff ``x / 2**64 < p`` (compared
    exactly), so the output is identical on every platform.
    """
    p = Fraction(p)
    if not 0 <= p <= 1:
        raise ParameterError("p", f"must lie in [0,1], got {p}")
    rng = random.Random(seed)
    num, den = p.numerator, p.denominator
    rows = [0] * n
    for i in range(n):
        for j in range(i + 1, n):
            if rng.getrandbits(64) * den < num << 64:
                rows[i] |= 1 << j
                rows[j] |= 1 << i
    return Graph(n, tuple(rows))


def generate(spec: FamilySpec) -> Graph:
    """Canonical member of a named graph family."""
    match spec:
        case Path(k):
            _positive("k", k)
            return Graph.from_edges(k, [(i, i + 1) for i in range(k - 1)])
        case Cycle(k):
            _positive("k", k, 3)
            return Graph.from_edges(k, [(i, (i + 1) % k) for i in range(k)])
        case CompleteBipartite(s, s2):
            _positive("s", s)
            _positive("s2", s2)
            return Graph.from_edges(s + s2, [(i, s + j) for i in range(s) for j in range(s2)])
        case Broom(k, l):
            _positive("k", k, 2)
            _positive("l", l)
            # 0 is the centre, 1..k-1 the subdivided handle, k..k+l-1 the leaves
            edges = [(i, i + 1) for i in range(k - 1)]
            edges += [(0, k + j) for j in range(l)]
            return Graph.from_edges(k + l, edges)
        case CocktailMulti(m, s):
            _positive("m", m)
            _positive("s", s)
            return generate(CompleteMultipartite((s,) * m))
        case CompleteMultipartite(parts):
            if not parts:
                raise ParameterError("parts", "need at least one part")
            for size in parts:
                _positive("parts", size)
            label = [i for i, size in enumerate(parts) for _ in range(size)]
            n = len(label)
            return Graph.from_edges(n, [(u, v) for u, v in combinations(range(n), 2) if label[u] != label[v]])
        case Star(l):
            _positive("l", l)
            return Graph.from_edges(l + 1, [(0, j) for j in range(1, l + 1)])
        case Complete(n):
            _positive("n", n, 0)
            return Graph.from_edges(n, combinations(range(n), 2))
        case Empty(n):
            _positive("n", n, 0)
            return Graph.empty(n)
        case Blowup(base, depth):
            _positive("depth", depth, 0)
            b = generate(base)
            g = Graph(1, (0,))
            for _ in range(depth):
                g = substitute(b, g)
            return g
        case Random(n, p, seed):
            _positive("n", n)
            return random_graph(n, p, seed)
        case Complement(inner):
            return generate(inner).complement()
        case DisjointUnion(parts):
            if not parts:
                raise ParameterError("parts", "need at least one graph")
            return disjoint_union([generate(p) for p in parts])
        case Petersen():
            outer = [(i, (i + 1) % 5) for i in range(5)]
            inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
            spokes = [(i, i + 5) for i in range(5)]
            return Graph.from_edges(10, outer + inner + spokes)
    raise ParameterError("spec", f"unknown family {spec!r}")


_SPEC_NAMES = {
    "path": Path, "p": Path, "cycle": Cycle, "c": Cycle,
    "completebipartite": CompleteBipartite, "k": CompleteBipartite, "broom": Broom,
    "cocktailmulti": CocktailMulti, "cocktail": CocktailMulti,
    "completemultipartite": CompleteMultipartite, "multipartite": CompleteMultipartite,
    "star": Star, "complete": Complete, "empty": Empty, "blowup": Blowup,
    "random": Random, "complement": Complement, "disjointunion": DisjointUnion,
    "union": DisjointUnion, "petersen": Petersen,
}

_TOKEN = re.compile(r"\s*(?:(\d+/\d+|\d+)|([A-Za-z_]+)|(.))")


def parse_family(text: str) -> FamilySpec:
    """Parse ``Broom(8,5)``, ``Blowup(Cycle(5),2)``, ``Random(14,1/2,7)``...

    Names are case-insensitive; ``Petersen`` takes no arguments.
    """
    tokens = [m.groups() for m in _TOKEN.finditer(text) if m.group(0).strip()]
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else (None, None, None)

    def expect(ch):
        nonlocal pos
        if peek()[2] != ch:
            raise ParameterError("spec", f"expected {ch!r} in {text!r}")
        pos += 1

    def value():
        nonlocal pos
        num, name, _ = peek()
        if num is not None:
            pos += 1
            return Fraction(num) if "/" in num else int(num)
        if name is not None:
            return spec()
        raise ParameterError("spec", f"unexpected token in {text!r}")

    def spec():
        nonlocal pos
        _, name, _ = peek()
        cls = _SPEC_NAMES.get((name or "").lower())
        if cls is None:
            raise ParameterError("spec", f"unknown family {name!r}")
        pos += 1
        args = []
        if peek()[2] == "(":
            expect("(")
            if peek()[2] != ")":
                args.append(value())
                while peek()[2] == ",":
                    pos += 1
                    args.append(value())
            expect(")")
        if cls is CompleteMultipartite:
            return cls(tuple(args))
        if cls is DisjointUnion:
            return cls(tuple(args))
        if cls is Random:
            if len(args) != 3:
                raise ParameterError("spec", "Random takes (n, p, seed)")
            return cls(args[0], Fraction(args[1]), args[2])
        try:
            return cls(*args)
        except TypeError as exc:
            raise ParameterError("spec", f"bad arguments for {cls.__name__}: {exc}") from None

    result = spec()
    if pos != len(tokens):
        raise ParameterError("spec", f"trailing input in {text!r}")
    return result


# --------------------------------------------------------------------------
# canonical form and enumeration
# --------------------------------------------------------------------------


def _refine(rows: Sequence[int], cells: list[list[int]]) -> list[list[int]]:
    """Equitable refinement of an ordered partition (label-invariant)."""
    while True:
        masks = [to_mask(c) for c in cells]
        out: list[list[int]] = []
        split = False
        for cell in cells:
            if len(cell) == 1:
                out.append(cell)
                continue
            sig: dict[tuple[int, ...], list[int]] = {}
            for v in cell:
                key = tuple((rows[v] & m).bit_count() for m in masks)
                sig.setdefault(key, []).append(v)
            if len(sig) > 1:
                split = True
                out.extend(sig[k] for k in sorted(sig))
            else:
                out.append(cell)
        cells = out
        if not split:
            return cells


def _code(rows: Sequence[int], order: Sequence[int]) -> int:
    code = 0
    n = len(order)
    for i in range(n):
        ri = rows[order[i]]
        for j in range(i + 1, n):
            code = (code << 1) | ((ri >> order[j]) & 1)
    return code


def canonical_labeling(G: Graph) -> list[int]:
    """An order of ``V(G)`` such that isomorphic graphs yield identical relabellings.

    Individualisation-refinement search maximising the upper-triangle code,
    with orbit pruning from automorphisms discovered at equal leaves.
    """
    n = G.n
    rows = G.rows
    if n <= 1:
        return list(range(n))
    best_code = -1
    best_order: list[int] | None = None
    autos: list[tuple[int, ...]] = []

    def orbit(w: int, fixed: list[int]) -> set[int]:
        gens = [a for a in autos if all(a[x] == x for x in fixed)]
        seen = {w}
        todo = [w]
        while todo:
            x = todo.pop()
            for a in gens:
                y = a[x]
                if y not in seen:
                    seen.add(y)
                    todo.append(y)
        return seen

    def search(cells: list[list[int]], prefix: list[int]) -> None:
        nonlocal best_code, best_order
        cells = _refine(rows, cells)
        idx = next((i for i, c in enumerate(cells) if len(c) > 1), None)
        if idx is None:
            order = [c[0] for c in cells]
            code = _code(rows, order)
            if code > best_code:
                best_code, best_order = code, order
            elif code == best_code:
                gamma = [0] * n
                for a, b in zip(best_order, order):
                    gamma[a] = b
                autos.append(tuple(gamma))
            return
        cell = cells[idx]
        explored: list[int] = []
        for w in sorted(cell):
            if explored and orbit(w, prefix) & set(explored):
                continue
            rest = [x for x in cell if x != w]
            search(cells[:idx] + [[w], rest] + cells[idx + 1:], prefix + [w])
            explored.append(w)

    search([list(range(n))], [])
    assert best_order is not None
    return best_order


def canonical_form(G: Graph) -> Graph:
    order = canonical_labeling(G)
    perm = [0] * G.n
    for i, v in enumerate(order):
        perm[v] = i
    return G.relabel(perm)


def is_isomorphic(G: Graph, H: Graph) -> bool:
    return G.n == H.n and G.num_edges() == H.num_edges() and canonical_form(G) == canonical_form(H)


MAX_DEDUP_N = 8
MAX_LABELLED_N = 6


@lru_cache(maxsize=None)
def _unlabelled(n: int) -> tuple[Graph, ...]:
    if n == 0:
        return (Graph(0, ()),)
    seen: set[Graph] = set()
    new_bit = 1 << (n - 1)
    for g in _unlabelled(n - 1):
        for nbrs in range(1 << (n - 1)):
            rows = [r | (new_bit if (nbrs >> v) & 1 else 0) for v, r in enumerate(g.rows)]
            rows.append(nbrs)
            seen.add(canonical_form(Graph._trusted(n, tuple(rows))))
    return tuple(sorted(seen, key=lambda g: (g.num_edges(), g.rows)))


def enumerate_graphs(n: int, dedup: bool = True) -> Iterator[Graph]:
    """Every graph on ``n`` vertices, once per isomorphism class when ``dedup``.

    The deduplicated order is by edge count, then by canonical adjacency rows;
    without dedup, labelled graphs come in order of their upper-triangle mask.
    """
    if n < 0:
        raise ParameterError("n", "must be >= 0")
    if dedup:
        if n > MAX_DEDUP_N:
            raise CapabilityError(f"isomorphism-class enumeration supports n <= {MAX_DEDUP_N}")
        yield from _unlabelled(n)
        return
    if n > MAX_LABELLED_N:
        raise CapabilityError(f"labelled enumeration supports n <= {MAX_LABELLED_N}")
    pairs = list(combinations(range(n), 2))
    for mask in range(1 << len(pairs)):
        yield Graph.from_edges(n, [pairs[i] for i in bits(mask)])


def corpus(max_n: int) -> Iterator[Graph]:
    """All isomorphism classes on ``0..max_n`` vertices, smallest order first."""
    for n in range(max_n + 1):
        yield from enumerate_graphs(n)


def check_exhaustive_size(G: Graph, what: str) -> None:
    if G.n > MAX_EXHAUSTIVE_N:
        raise CapabilityError(f"{what} supports at most {MAX_EXHAUSTIVE_N} vertices, got {G.n}")
