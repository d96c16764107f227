"""Exact graph parameters and definitional predicates.

Chromatic number, clique and stability numbers, degeneracy, connectivity in
the "more than ``a`` vertices and no separator of size below ``a``" sense,
Ramsey values, ordered edge-pair counts, ``(c, t)``-sparseness and
``(eps, chi)``-density.  Every threshold comparison uses ``Fraction``.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from itertools import combinations
from math import comb
from pathlib import Path
from typing import Iterable, NamedTuple

from .errors import CapabilityError, ParameterError
from .graph import Graph, bits, check_exhaustive_size, to_mask

DEFAULT_CHI_BUDGET = 10**8
SPARSE_EXHAUSTIVE_MAX_N = 20

_chi_budget = DEFAULT_CHI_BUDGET


def set_chi_budget(nodes: int) -> None:
    """Set the branch-and-bound node budget used by :func:`chromatic_number`."""
    global _chi_budget
    if nodes < 1:
        raise ParameterError("budget", "must be positive")
    _chi_budget = nodes
    _chi_rows.cache_clear()


# ---------------------------------------------------------------------------
# cliques and stable sets
# ---------------------------------------------------------------------------


def _colour_order(rows: tuple[int, ...], cand: int) -> list[tuple[int, int]]:
    """Greedy colouring of ``cand``; returns ``(vertex, colour)`` by colour."""
    out = []
    colour = 0
    while cand:
        colour += 1
        avail = cand
        while avail:
            v = (avail & -avail).bit_length() - 1
            out.append((v, colour))
            cand &= ~(1 << v)
            avail &= ~rows[v] & ~(1 << v)
    return out


def max_clique_mask(rows: tuple[int, ...], mask: int) -> int:
    """A maximum clique of the graph on ``mask`` (largest-colour-bound search).

    Ties are broken deterministically by the search order.
    """
    best = 0
    best_size = 0

    def expand(clique: int, size: int, cand: int) -> None:
        nonlocal best, best_size
        order = _colour_order(rows, cand)
        for v, colour in reversed(order):
            if size + colour <= best_size:
                return
            bit = 1 << v
            nxt = cand & rows[v]
            if nxt:
                expand(clique | bit, size + 1, nxt)
            elif size + 1 > best_size:
                best, best_size = clique | bit, size + 1
            cand &= ~bit

    if mask:
        expand(0, 0, mask)
    return best


def clique_number(G: Graph) -> int:
    check_exhaustive_size(G, "clique number")
    return max_clique_mask(G.rows, G.full_mask).bit_count()


def stability_number(G: Graph) -> int:
    check_exhaustive_size(G, "stability number")
    return max_clique_mask(G.complement().rows, G.full_mask).bit_count()


def maximum_stable_set(G: Graph) -> list[int]:
    """A maximum stable set; the lexicographically least one among maxima."""
    check_exhaustive_size(G, "stability number")
    comp = G.complement()
    alpha = max_clique_mask(comp.rows, G.full_mask).bit_count()
    # lexicographically least: greedily fix vertices while a max clique survives
    chosen = 0
    cand = G.full_mask
    size = 0
    for v in range(G.n):
        if not (cand >> v) & 1:
            continue
        rest = cand & comp.rows[v] & ~((1 << (v + 1)) - 1)
        if size + 1 + max_clique_mask(comp.rows, rest).bit_count() == alpha:
            chosen |= 1 << v
            size += 1
            cand = rest
        else:
            cand &= ~(1 << v)
        if size == alpha:
            break
    return list(bits(chosen))


def is_stable(G: Graph, S: Iterable[int]) -> bool:
    m = to_mask(S)
    return all(not (G.rows[v] & m) for v in bits(m))


def is_clique(G: Graph, S: Iterable[int]) -> bool:
    m = to_mask(S)
    return all((G.rows[v] | (1 << v)) & m == m for v in bits(m))


def find_stable_set(G: Graph, s: int, mask: int | None = None) -> list[int] | None:
    """Lexicographically least stable set of size ``s`` inside ``mask``."""
    if mask is None:
        mask = G.full_mask
    rows = G.rows
    picked: list[int] = []

    def go(cand: int) -> bool:
        if len(picked) == s:
            return True
        while cand:
            if cand.bit_count() < s - len(picked):
                return False
            v = (cand & -cand).bit_length() - 1
            cand &= ~(1 << v)
            picked.append(v)
            if go(cand & ~rows[v]):
                return True
            picked.pop()
        return False

    return list(picked) if go(mask) else None


def iter_stable_sets(G: Graph, s: int, mask: int | None = None):
    """All stable ``s``-subsets of ``mask`` in lexicographic order."""
    if mask is None:
        mask = G.full_mask
    rows = G.rows
    picked: list[int] = []

    def go(cand: int):
        if len(picked) == s:
            yield list(picked)
            return
        while cand:
            if cand.bit_count() < s - len(picked):
                return
            v = (cand & -cand).bit_length() - 1
            cand &= ~(1 << v)
            picked.append(v)
            yield from go(cand & ~rows[v])
            picked.pop()

    yield from go(mask)


# ---------------------------------------------------------------------------
# chromatic number
# ---------------------------------------------------------------------------


def _dsatur_greedy(rows: tuple[int, ...], n: int) -> list[int]:
    colours = [-1] * n
    classes: list[int] = []
    for _ in range(n):
        best_v, best_key = -1, None
        for v in range(n):
            if colours[v] >= 0:
                continue
            sat = sum(1 for c in classes if c & rows[v])
            key = (sat, rows[v].bit_count())
            if best_key is None or key > best_key:
                best_v, best_key = v, key
        v = best_v
        for c, cls in enumerate(classes):
            if not cls & rows[v]:
                colours[v] = c
                classes[c] |= 1 << v
                break
        else:
            colours[v] = len(classes)
            classes.append(1 << v)
    return colours


@lru_cache(maxsize=200_000)
def _chi_rows(rows: tuple[int, ...]) -> tuple[int, tuple[int, ...]]:
    n = len(rows)
    if n == 0:
        return 0, ()
    if not any(rows):
        return 1, (0,) * n
    clique = max_clique_mask(rows, (1 << n) - 1)
    lower = clique.bit_count()
    best_colours = _dsatur_greedy(rows, n)
    best = max(best_colours) + 1
    if best == lower:
        return best, tuple(best_colours)

    colours = [-1] * n
    classes: list[int] = []
    for i, v in enumerate(bits(clique)):
        colours[v] = i
        classes.append(1 << v)
    uncoloured = ((1 << n) - 1) & ~clique
    nodes = 0
    budget = _chi_budget

    def search(uncol: int) -> bool:
        nonlocal best, best_colours, nodes
        nodes += 1
        if nodes > budget:
            raise CapabilityError(f"chromatic number search exceeded {budget} nodes (n={n})")
        if not uncol:
            best = len(classes)
            best_colours = list(colours)
            return best == lower
        pick, pick_key = -1, None
        for v in bits(uncol):
            r = rows[v]
            sat = 0
            for c in classes:
                if c & r:
                    sat += 1
            key = (sat, (r & uncol).bit_count())
            if pick_key is None or key > pick_key:
                pick, pick_key = v, key
        v = pick
        r = rows[v]
        rest = uncol & ~(1 << v)
        for c in range(len(classes)):
            if not classes[c] & r:
                classes[c] |= 1 << v
                colours[v] = c
                done = search(rest)
                classes[c] &= ~(1 << v)
                colours[v] = -1
                if done:
                    return True
        if len(classes) + 1 < best:
            classes.append(1 << v)
            colours[v] = len(classes) - 1
            done = search(rest)
            classes.pop()
            colours[v] = -1
            if done:
                return True
        return False

    search(uncoloured)
    return best, tuple(best_colours)


def chromatic_number(G: Graph) -> int:
    """Exact chromatic number (DSATUR branch and bound seeded by a maximum clique)."""
    check_exhaustive_size(G, "chromatic number")
    return _chi_rows(G.rows)[0]


def optimal_colouring(G: Graph) -> list[int]:
    check_exhaustive_size(G, "chromatic number")
    return list(_chi_rows(G.rows)[1])


def chi_of(G: Graph, mask: int) -> int:
    """``chi(G[mask])``."""
    return _chi_rows(G.induced_mask(mask).rows)[0]


def degeneracy(G: Graph) -> int:
    rows = list(G.rows)
    alive = G.full_mask
    best = 0
    while alive:
        v = min(bits(alive), key=lambda x: (rows[x] & alive).bit_count())
        best = max(best, (rows[v] & alive).bit_count())
        alive &= ~(1 << v)
    return best


class Invariants(NamedTuple):
    chi: int
    omega: int
    alpha: int
    degeneracy: int


def exact_invariants(G: Graph) -> Invariants:
    return Invariants(chromatic_number(G), clique_number(G), stability_number(G), degeneracy(G))


# ---------------------------------------------------------------------------
# connectivity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConnectivityVerdict:
    connected: bool
    reason: str = ""
    cutset: tuple[int, ...] = ()
    side_a: tuple[int, ...] = ()
    side_b: tuple[int, ...] = ()

    def __bool__(self) -> bool:
        return self.connected


def _component(rows, alive: int, start: int) -> int:
    seen = 1 << start
    frontier = seen
    while frontier:
        nxt = 0
        for v in bits(frontier):
            nxt |= rows[v]
        nxt &= alive & ~seen
        seen |= nxt
        frontier = nxt
    return seen


def components(G: Graph, mask: int | None = None) -> list[int]:
    """Connected components of ``G[mask]`` as masks, ordered by least vertex."""
    alive = G.full_mask if mask is None else mask
    out = []
    while alive:
        v = (alive & -alive).bit_length() - 1
        comp = _component(G.rows, alive, v)
        out.append(comp)
        alive &= ~comp
    return out


def _local_separator(rows, n: int, u: int, v: int, cap: int) -> tuple[int, int]:
    """Max number (capped at ``cap``) of internally disjoint u-v paths.

    Returns ``(flow, separator_mask)``; the separator is meaningful when
    ``flow < cap``.  Vertex ``x`` splits into ``2x`` (in) and ``2x+1`` (out).
    """
    flow_edges: dict[tuple[int, int], int] = {}

    def residual(a: int, b: int) -> int:
        return flow_edges.get((a, b), 0)

    def cap_of(a: int, b: int) -> int:
        if b == a + 1 and a % 2 == 0:
            x = a // 2
            return n if x in (u, v) else 1
        if a % 2 == 1 and b % 2 == 0:
            x, y = a // 2, b // 2
            return 1 if (rows[x] >> y) & 1 else 0
        return 0

    def succ(a: int):
        x = a // 2
        if a % 2 == 0:
            yield a + 1
            for y in bits(rows[x]):
                yield 2 * y + 1  # reverse of out(y)->in(x)
        else:
            yield a - 1
            for y in bits(rows[x]):
                yield 2 * y

    src, dst = 2 * u + 1, 2 * v
    flow = 0
    while flow < cap:
        parent = {src: None}
        q = deque([src])
        while q and dst not in parent:
            a = q.popleft()
            for b in succ(a):
                if b in parent:
                    continue
                if cap_of(a, b) - residual(a, b) + residual(b, a) > 0:
                    parent[b] = a
                    q.append(b)
        if dst not in parent:
            reach = parent.keys()
            sep = 0
            for x in range(n):
                if 2 * x in reach and 2 * x + 1 not in reach and x not in (u, v):
                    sep |= 1 << x
            return flow, sep
        b = dst
        while parent[b] is not None:
            a = parent[b]
            back = residual(b, a)
            if back:
                flow_edges[(b, a)] = back - 1
            else:
                flow_edges[(a, b)] = residual(a, b) + 1
            b = a
        flow += 1
    return flow, 0


def is_a_connected(G: Graph, a: int) -> ConnectivityVerdict:
    """True iff ``|V| > a`` and no set of fewer than ``a`` vertices separates ``G``."""
    if a < 0:
        raise ParameterError("a", "must be >= 0")
    n = G.n
    if n <= a:
        return ConnectivityVerdict(False, f"only {n} vertices, need more than {a}")
    if a == 0:
        return ConnectivityVerdict(True)
    rows = G.rows
    full = G.full_mask
    comps = components(G)
    if len(comps) > 1:
        return ConnectivityVerdict(False, "disconnected", (), tuple(bits(comps[0])),
                                   tuple(bits(full & ~comps[0])))
    # quick witness: a vertex of small degree that is not universal
    for x in range(n):
        deg = rows[x].bit_count()
        if deg < a and deg < n - 1:
            rest = full & ~rows[x] & ~(1 << x)
            return ConnectivityVerdict(False, f"vertex {x} has degree {deg}",
                                       tuple(bits(rows[x])), (x,), tuple(bits(rest)))
    for u in range(n):
        for v in bits(full & ~rows[u] & ~((1 << (u + 1)) - 1)):
            flow, sep = _local_separator(rows, n, u, v, a)
            if flow < a:
                alive = full & ~sep
                side = _component(rows, alive, u)
                return ConnectivityVerdict(False, f"{flow} disjoint paths between {u} and {v}",
                                           tuple(bits(sep)), tuple(bits(side)),
                                           tuple(bits(alive & ~side)))
    return ConnectivityVerdict(True)


def vertex_connectivity(G: Graph) -> int:
    """Largest ``a`` such that ``G`` is ``a``-connected (0 for the null graph)."""
    a = 0
    while is_a_connected(G, a + 1):
        a += 1
    return a


# ---------------------------------------------------------------------------
# Ramsey numbers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RamseyValue:
    value: int
    exact: bool
    source: str = ""

    @property
    def exactness(self) -> str:
        return "Exact" if self.exact else "UpperBound"


class RamseyTable:
    """Exact values ``{(s, w): (value, source)}``, stored symmetrically."""

    def __init__(self, entries: dict[tuple[int, int], tuple[int, str]]):
        self._entries = {}
        for (s, w), val in entries.items():
            self._entries[(s, w)] = val
            self._entries[(w, s)] = val

    @classmethod
    def load(cls, path: str | Path | None = None) -> "RamseyTable":
        if path is None:
            text = resources.files("ramseychi").joinpath("data/ramsey.txt").read_text()
        else:
            text = Path(path).read_text()
        entries = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) < 3:
                raise ParameterError("ramsey-table", f"line {lineno}: need 's w value source'")
            s, w, value = int(parts[0]), int(parts[1]), int(parts[2])
            entries[(s, w)] = (value, " ".join(parts[3:]))
        return cls(entries)

    def lookup(self, s: int, w: int) -> RamseyValue:
        if s < 1 or w < 1:
            raise ParameterError("s" if s < 1 else "w", "Ramsey arguments must be >= 1")
        if s == 1 or w == 1:
            return RamseyValue(1, True, "computed")
        if s == 2:
            return RamseyValue(w, True, "computed")
        if w == 2:
            return RamseyValue(s, True, "computed")
        hit = self._entries.get((s, w))
        if hit is not None:
            return RamseyValue(hit[0], True, hit[1])
        return RamseyValue(comb(s + w - 2, s - 1), False, "binomial bound")

    def entries(self) -> list[tuple[int, int, int]]:
        return sorted((s, w, v) for (s, w), (v, _) in self._entries.items())


_table: RamseyTable | None = None


def set_ramsey_table(path: str | Path | None) -> None:
    global _table
    _table = RamseyTable.load(path)


def ramsey_table() -> RamseyTable:
    global _table
    if _table is None:
        _table = RamseyTable.load()
    return _table


def ramsey(s: int, w: int) -> RamseyValue:
    """``R(s, w)``: tabled exact value, else the binomial bound ``C(s+w-2, s-1)``."""
    return ramsey_table().lookup(s, w)


# ---------------------------------------------------------------------------
# density predicates
# ---------------------------------------------------------------------------


def edge_pair_count(G: Graph, A: Iterable[int], B: Iterable[int]) -> int:
    """``|{(a, b) in A x B : ab in E}|``; edges inside ``A ∩ B`` count twice."""
    amask = G._checked_mask(A)
    bmask = G._checked_mask(B)
    return sum((G.rows[a] & bmask).bit_count() for a in bits(amask))


@dataclass(frozen=True)
class SparsenessVerdict:
    sparse: bool
    A: tuple[int, ...] = ()
    B: tuple[int, ...] = ()
    count: int = 0
    exhaustive: bool = True

    @property
    def violating_pair(self):
        if self.sparse:
            return None
        return self.A, self.B, self.count


def _check_c(c) -> Fraction:
    c = Fraction(c)
    if not 0 < c < 1:
        raise ParameterError("c", f"must satisfy 0 < c < 1, got {c}")
    return c


def is_ct_sparse(G: Graph, c, t: int, mode: str = "exhaustive", samples: int = 2000,
                 seed: int = 0) -> SparsenessVerdict:
    """Decide ``(c, t)``-sparseness.

    Exhaustive mode scans every ``A`` with ``|A| >= t``; for fixed ``A`` and
    ``|B| = k`` the densest ``B`` is the ``k`` vertices with the most
    neighbours in ``A``, so this is sound and complete.  Sampling mode only
    refutes: a ``sparse=True`` answer from it carries ``exhaustive=False``.
    """
    c = _check_c(c)
    if t < 1:
        raise ParameterError("t", "must be >= 1")
    n = G.n
    rows = G.rows
    slack = 1 - c

    def densest_b(amask: int):
        size_a = amask.bit_count()
        degs = sorted(((-(rows[v] & amask).bit_count(), v) for v in range(n)))
        total = 0
        for k, (neg, _) in enumerate(degs, 1):
            total -= neg
            if k >= t and total > slack * size_a * k:
                return tuple(sorted(v for _, v in degs[:k])), total
        return None

    if mode == "exhaustive":
        if n > SPARSE_EXHAUSTIVE_MAX_N:
            raise CapabilityError(f"exhaustive sparseness supports n <= {SPARSE_EXHAUSTIVE_MAX_N}")
        for size in range(max(t, 1), n + 1):
            for combo in combinations(range(n), size):
                amask = to_mask(combo)
                hit = densest_b(amask)
                if hit:
                    return SparsenessVerdict(False, combo, hit[0], hit[1])
        return SparsenessVerdict(True)
    if mode == "sample":
        rng = random.Random(seed)
        if n < t:
            return SparsenessVerdict(True, exhaustive=False)
        for _ in range(samples):
            size = rng.randint(t, n)
            amask = to_mask(rng.sample(range(n), size))
            hit = densest_b(amask)
            if hit:
                return SparsenessVerdict(False, tuple(bits(amask)), hit[0], hit[1], exhaustive=False)
        return SparsenessVerdict(True, exhaustive=False)
    raise ParameterError("mode", f"unknown mode {mode!r}")


@dataclass(frozen=True)
class DensityVerdict:
    dense: bool
    vertex: int | None = None
    chi: int = 0
    chi_nonneighbours: int | None = None

    def __bool__(self) -> bool:
        return self.dense


def is_eps_chi_dense(G: Graph, eps) -> DensityVerdict:
    """Every vertex's non-neighbours induce chromatic number ``< eps * chi(G)``."""
    eps = Fraction(eps)
    if eps <= 0:
        raise ParameterError("eps", "must be positive")
    chi = chromatic_number(G)
    bound = eps * chi
    for v in range(G.n):
        rest = G.full_mask & ~G.rows[v] & ~(1 << v)
        k = chi_of(G, rest)
        if not k < bound:
            return DensityVerdict(False, v, chi, k)
    return DensityVerdict(True, None, chi)
