"""Wide rooted trees, skeletons and induced trees in sparse graphs.

A skeleton from a rooted tree ``(T, r)`` into ``G`` is a locally injective
homomorphism that sends every root-to-leaf path onto an induced path.
Trees here always have root ``0`` and ``parent[i] < i``, so node order is
parent-before-child and "lexicographically least" is well defined.

The procedures follow the counting arguments step by step.  Every set the
argument produces is recomputed from the host, and every promised size
bound is checked.  With ``force=False`` a failed bound raises
:class:`InternalInvariantError` (or :class:`SparsenessViolation` when the
failure is a too-dense pair of host sets of size at least ``t``).  With
``force=True`` failures are collected in ``degraded`` and the run goes on;
whatever it returns is still validated structurally.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import ceil, comb
from typing import Iterable, Sequence

from .detectors import verify_embedding
from .errors import (
    CapabilityError,
    HypothesisUnmetError,
    InternalInvariantError,
    ParameterError,
    SparsenessViolation,
)
from .graph import Graph, bits, to_mask

DEFAULT_SEARCH_BUDGET = 2_000_000


# ---------------------------------------------------------------------------
# Phi
# ---------------------------------------------------------------------------


def _check_c(c) -> Fraction:
    c = Fraction(c)
    if not 0 < c < Fraction(1, 2):
        raise ParameterError("c", f"must satisfy 0 < c < 1/2, got {c}")
    return c


def phi(c, h: int) -> Fraction:
    """``Phi(c, h)`` by its recurrence."""
    c = _check_c(c)
    if h < 0:
        raise ParameterError("h", "must be >= 0")
    if h == 0:
        return Fraction(0)
    value = Fraction(1)
    for j in range(1, h):
        value = (value + 2) * (4 / c) ** (j + 1)
    return value


def phi_closed_form(c, h: int) -> Fraction:
    """``eps^-C(h+1,2) * (eps + 2 * sum_{i=2..h} eps^C(i,2))`` with ``eps = c/4``, for ``h >= 1``."""
    c = _check_c(c)
    if h < 1:
        raise ParameterError("h", "closed form holds for h >= 1")
    eps = c / 4
    inner = eps + 2 * sum((eps ** comb(i, 2) for i in range(2, h + 1)), Fraction(0))
    return inner / eps ** comb(h + 1, 2)


def phi_upper_bound(c, h: int) -> Fraction:
    """``c * (4/c)^C(h+1,2)``."""
    c = _check_c(c)
    return c * (4 / c) ** comb(h + 1, 2)


# ---------------------------------------------------------------------------
# rooted trees
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RootedTree:
    """Rooted tree on nodes ``0..N-1`` with root 0 and ``parent[i] < i``."""

    parent: tuple[int, ...]

    def __post_init__(self):
        p = tuple(self.parent)
        object.__setattr__(self, "parent", p)
        if not p or p[0] != -1:
            raise ParameterError("parent", "node 0 must be the root (parent -1)")
        for i in range(1, len(p)):
            if not 0 <= p[i] < i:
                raise ParameterError("parent", f"node {i} needs a parent in 0..{i - 1}")

    @property
    def size(self) -> int:
        return len(self.parent)

    @cached_property
    def children(self) -> tuple[tuple[int, ...], ...]:
        kids: list[list[int]] = [[] for _ in self.parent]
        for i in range(1, self.size):
            kids[self.parent[i]].append(i)
        return tuple(tuple(k) for k in kids)

    @cached_property
    def height(self) -> tuple[int, ...]:
        hts = [0] * self.size
        for i in range(1, self.size):
            hts[i] = hts[self.parent[i]] + 1
        return tuple(hts)

    @property
    def depth(self) -> int:
        return max(self.height)

    def descendants(self, x: int) -> frozenset[int]:
        out = {x}
        for i in range(x + 1, self.size):
            if self.parent[i] in out:
                out.add(i)
        return frozenset(out)

    def ancestors(self, x: int) -> list[int]:
        out = []
        while self.parent[x] >= 0:
            x = self.parent[x]
            out.append(x)
        return out

    @cached_property
    def shapes(self) -> tuple[str, ...]:
        """Canonical string of each node's subtree (equal iff isomorphic)."""
        sh = [""] * self.size
        for x in range(self.size - 1, -1, -1):
            sh[x] = "(" + "".join(sorted(sh[k] for k in self.children[x])) + ")"
        return tuple(sh)

    def to_graph(self) -> Graph:
        return Graph.from_edges(self.size, [(self.parent[i], i) for i in range(1, self.size)])

    def is_wide(self, d, h: int) -> bool:
        need = ceil(Fraction(d))
        return self.depth == h and all(
            len(self.children[x]) >= need for x in range(self.size) if self.height[x] < h)

    @classmethod
    def wide(cls, d, h: int) -> "RootedTree":
        """Depth ``h``, exactly ``ceil(d)`` children at every node of height below ``h``."""
        w = ceil(Fraction(d))
        if h < 0 or (h > 0 and w < 1):
            raise ParameterError("d", "need d >= 1 for positive depth")
        parent = [-1]
        level = [0]
        for _ in range(h):
            nxt = []
            for x in level:
                for _ in range(w):
                    parent.append(x)
                    nxt.append(len(parent) - 1)
            level = nxt
        return cls(tuple(parent))

    @classmethod
    def from_graph(cls, F: Graph, root: int) -> tuple["RootedTree", tuple[int, ...]]:
        """BFS relabelling of a tree ``F`` rooted at ``root``; also returns node -> F-vertex."""
        if F.num_edges() != F.n - 1 or F.n == 0:
            raise ParameterError("F", "not a tree")
        order = [root]
        index = {root: 0}
        parent = [-1]
        i = 0
        while i < len(order):
            x = order[i]
            for y in F.neighbours(x):
                if y not in index:
                    index[y] = len(order)
                    order.append(y)
                    parent.append(index[x])
            i += 1
        if len(order) != F.n:
            raise ParameterError("F", "not connected")
        return cls(tuple(parent)), tuple(order)

    @classmethod
    def from_shape(cls, shape: str) -> "RootedTree":
        """Inverse of :attr:`shapes` for the root (BFS numbering)."""
        def split(s: str) -> list[str]:
            parts, depth, start = [], 0, 0
            for i, ch in enumerate(s):
                depth += 1 if ch == "(" else -1
                if depth == 0:
                    parts.append(s[start:i + 1])
                    start = i + 1
            return parts

        parent = [-1]
        queue = [(0, shape)]
        while queue:
            node, s = queue.pop(0)
            for part in split(s[1:-1]):
                parent.append(node)
                queue.append((len(parent) - 1, part))
        return cls(tuple(parent))


def rooted_trees(n: int) -> list[RootedTree]:
    """All rooted trees with ``n`` nodes up to isomorphism, in a fixed order."""
    if n < 1:
        return []
    memo: dict[int, list[str]] = {1: ["()"]}

    def shapes(m: int) -> list[str]:
        if m in memo:
            return memo[m]
        out = set()
        # multisets of child shapes with sizes summing to m - 1
        def build(remaining: int, max_key: tuple[int, str], acc: list[str]):
            if remaining == 0:
                out.add("(" + "".join(sorted(acc)) + ")")
                return
            for size in range(min(remaining, max_key[0]), 0, -1):
                for sh in shapes(size):
                    key = (size, sh)
                    if key <= max_key:
                        build(remaining - size, key, acc + [sh])
        build(m - 1, (m, "~"), [])
        memo[m] = sorted(out)
        return memo[m]

    return [RootedTree.from_shape(s) for s in shapes(n)]


# ---------------------------------------------------------------------------
# skeletons
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Skeleton:
    tree: RootedTree
    host: Graph
    map: tuple[int, ...]

    @property
    def root_image(self) -> int:
        return self.map[0]

    def image(self, nodes: Iterable[int] | None = None) -> set[int]:
        if nodes is None:
            return set(self.map)
        return {self.map[x] for x in nodes}


@dataclass(frozen=True)
class SkeletonVerdict:
    valid: bool
    reason: str = ""
    witness: tuple = ()

    def __bool__(self) -> bool:
        return self.valid


def validate_skeleton(sk: Skeleton, d=None, h: int | None = None) -> SkeletonVerdict:
    """Homomorphism, local injectivity, induced root-to-leaf paths, then ``(d, h)``-wideness."""
    T, G, m = sk.tree, sk.host, sk.map
    if len(m) != T.size:
        return SkeletonVerdict(False, "map size differs from tree size")
    if any(not 0 <= x < G.n for x in m):
        return SkeletonVerdict(False, "image outside host")
    for i in range(1, T.size):
        if not G.adjacent(m[i], m[T.parent[i]]):
            return SkeletonVerdict(False, "not a homomorphism", (T.parent[i], i))
    for x in range(T.size):
        nb = list(T.children[x]) + ([T.parent[x]] if x else [])
        imgs = [m[y] for y in nb]
        if len(set(imgs)) != len(imgs):
            return SkeletonVerdict(False, "not locally injective", (x,))
    for x in range(1, T.size):
        anc = T.ancestors(x)
        for a in anc[1:]:
            if m[x] == m[a] or G.adjacent(m[x], m[a]):
                return SkeletonVerdict(False, "root-to-leaf path not induced", (a, x))
    if h is not None and T.depth != h:
        return SkeletonVerdict(False, f"depth {T.depth} != {h}")
    if d is not None:
        hh = T.depth if h is None else h
        need = ceil(Fraction(d))
        for x in range(T.size):
            if T.height[x] < hh and len(T.children[x]) < need:
                return SkeletonVerdict(False, f"node has fewer than {need} children", (x,))
    return SkeletonVerdict(True)


class _Matcher:
    """Bipartite matching of slots to host vertices (augmenting paths)."""

    @staticmethod
    def match(options: list[list[int]]) -> dict[int, int] | None:
        owner: dict[int, int] = {}
        pending = []
        for i, opts in enumerate(options):
            free = next((w for w in opts if w not in owner), None)
            if free is None:
                pending.append(i)
            else:
                owner[free] = i

        def augment(i: int, seen: set[int]) -> bool:
            for w in options[i]:
                if w in seen:
                    continue
                seen.add(w)
                if w not in owner or augment(owner[w], seen):
                    owner[w] = i
                    return True
            return False

        for i in pending:
            if not augment(i, set()):
                return None
        return {i: w for w, i in owner.items()}


class _SkeletonSearch:
    def __init__(self, G: Graph, T: RootedTree, budget: int):
        self.G, self.T = G, T
        self.closed = [G.rows[v] | (1 << v) for v in range(G.n)]
        self.memo: dict[tuple[str, int, int], bool] = {}
        self.budget = budget

    def _tick(self):
        self.budget -= 1
        if self.budget < 0:
            raise CapabilityError("skeleton search exceeded its budget")

    def candidates(self, g: int, U: int) -> list[int]:
        return list(bits(self.G.rows[g] & ~U))

    def feasible(self, x: int, g: int, U: int) -> bool:
        """Can node ``x`` (image ``g``) be completed, given ancestors' closed nbhds ``U``?"""
        kids = self.T.children[x]
        if not kids:
            return True
        key = (self.T.shapes[x], g, U)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        self._tick()
        U2 = U | self.closed[g]
        cand = self.candidates(g, U)
        ok = len(cand) >= len(kids)
        if ok:
            opts = [[w for w in cand if self.feasible(k, w, U2)] for k in kids]
            ok = all(opts) and _Matcher.match(opts) is not None
        self.memo[key] = ok
        return ok

    def witness(self, root_image: int) -> tuple[int, ...] | None:
        T = self.T
        if not self.feasible(0, root_image, 0):
            return None
        img = [-1] * T.size
        img[0] = root_image
        U = [0] * T.size   # closed nbhds of strict ancestors
        options: dict[int, dict[int, list[int]]] = {}
        for x in range(1, T.size):
            p = T.parent[x]
            U[x] = U[p] | self.closed[img[p]]
            sibs = T.children[p]
            if p not in options:
                cand = self.candidates(img[p], U[p])
                options[p] = {k: [w for w in cand if self.feasible(k, w, U[x])] for k in sibs}
            opts = options[p]
            later = [k for k in sibs if k > x]
            used = {img[k] for k in sibs if k < x}
            for w in opts[x]:
                if w in used:
                    continue
                taken = used | {w}
                rest = [[u for u in opts[k] if u not in taken] for k in later]
                # Hall shortcut: every later slot has more room than there are slots
                if all(len(r) >= len(later) for r in rest) or _Matcher.match(rest) is not None:
                    img[x] = w
                    break
            else:  # pragma: no cover - feasibility was established above
                raise InternalInvariantError("find_skeleton", "greedy completion failed")
        return tuple(img)


def find_skeleton_tree(G: Graph, T: RootedTree, root: int | None = None,
                       budget: int = DEFAULT_SEARCH_BUDGET) -> Skeleton | None:
    """Lexicographically least skeleton from ``T`` into ``G`` (complete search)."""
    search = _SkeletonSearch(G, T, budget)
    roots = range(G.n) if root is None else [root]
    for r in roots:
        w = search.witness(r)
        if w is not None:
            return Skeleton(T, G, w)
    return None


def find_skeleton(G: Graph, d, h: int, root: int | None = None,
                  budget: int = DEFAULT_SEARCH_BUDGET) -> Skeleton | None:
    """A ``(d, h)``-skeleton (on the tree with exactly ``ceil(d)`` children per level), or None."""
    if h < 0:
        raise ParameterError("h", "must be >= 0")
    if Fraction(d) < 1 and h > 0:
        raise ParameterError("d", "must be >= 1")
    return find_skeleton_tree(G, RootedTree.wide(d, h), root, budget)


def find_skeleton_bruteforce(G: Graph, T: RootedTree, root: int | None = None) -> Skeleton | None:
    """Oracle: plain backtracking over homomorphisms in lexicographic node order."""
    img = [-1] * T.size
    anc = [T.ancestors(x) for x in range(T.size)]

    def go(x: int) -> bool:
        if x == T.size:
            return validate_skeleton(Skeleton(T, G, tuple(img))).valid
        p = T.parent[x]
        for w in G.neighbours(img[p]):
            if any(img[a] == w or G.adjacent(img[a], w) for a in anc[x][1:]):
                continue
            if any(img[s] == w for s in T.children[p] if s < x):
                continue
            img[x] = w
            if go(x + 1):
                return True
        img[x] = -1
        return False

    for r in (range(G.n) if root is None else [root]):
        img[0] = r
        if go(1):
            return Skeleton(T, G, tuple(img))
    return None


# ---------------------------------------------------------------------------
# eps-subtrees
# ---------------------------------------------------------------------------

Sub = tuple[int, frozenset]


def whole(sk: Skeleton) -> Sub:
    return 0, frozenset(range(sk.tree.size))


def _kids(T: RootedTree, nodes: frozenset, x: int) -> list[int]:
    return [k for k in T.children[x] if k in nodes]


def _sub_depth(T: RootedTree, sub: Sub) -> int:
    root, nodes = sub
    return max(T.height[x] for x in nodes) - T.height[root]


def _under(T: RootedTree, nodes: frozenset, x: int) -> frozenset:
    return frozenset(y for y in T.descendants(x) if y in nodes)


@dataclass(frozen=True)
class AvoidResult:
    value: Fraction                  # largest eps admitting an avoiding eps-subtree (0: none)
    nodes: frozenset                 # maximal such subtree at ``value`` (or at the eps asked for)
    fractions: dict                  # internal node -> kept children / children


def max_avoiding_subtree(sk: Skeleton, forbidden: Iterable[int] | int = (),
                         keep_root_only_contact: int | None = None, sub: Sub | None = None,
                         eps=None) -> AvoidResult:
    """Best eps-subtree whose image avoids ``forbidden``.

    ``val(x)`` is the largest eps for which the subtree below ``x`` has an
    avoiding eps-subtree: 0 if ``x`` is forbidden, 1 at an allowed leaf,
    and ``max_k min(c_k, k/m)`` over the sorted child values otherwise.
    With ``keep_root_only_contact=u`` the forbidden set becomes ``N[u]``,
    the root is exempt and must be adjacent to ``u`` (the nice variant).
    """
    T, G = sk.tree, sk.host
    root, nodes = sub if sub is not None else whole(sk)
    fmask = forbidden if isinstance(forbidden, int) else to_mask(forbidden)
    if keep_root_only_contact is not None:
        u = keep_root_only_contact
        fmask |= G.rows[u] | (1 << u)
    val: dict[int, Fraction] = {}
    for x in sorted(nodes, reverse=True):
        bad = (fmask >> sk.map[x]) & 1
        if x == root and keep_root_only_contact is not None:
            bad = not G.adjacent(sk.map[x], keep_root_only_contact)
        if bad:
            val[x] = Fraction(0)
            continue
        kids = _kids(T, nodes, x)
        if not kids:
            val[x] = Fraction(1)
            continue
        cs = sorted((val[k] for k in kids), reverse=True)
        m = len(cs)
        val[x] = max(min(cs[k - 1], Fraction(k, m)) for k in range(1, m + 1))
    value = val[root]
    target = value if eps is None else Fraction(eps)
    keep: set[int] = set()
    fracs: dict[int, Fraction] = {}
    if value > 0 and value >= target:
        stack = [root]
        while stack:
            x = stack.pop()
            keep.add(x)
            kids = _kids(T, nodes, x)
            if kids:
                good = [k for k in kids if val[k] >= target]
                fracs[x] = Fraction(len(good), len(kids))
                stack.extend(good)
    return AvoidResult(value, frozenset(keep), fracs)


def subtree_fraction(sk: Skeleton, sub: Sub, kept: frozenset) -> Fraction:
    """Smallest kept-children fraction over kept internal nodes of ``sub`` (1 if none)."""
    T = sk.tree
    _, nodes = sub
    worst = Fraction(1)
    for x in kept:
        kids = _kids(T, nodes, x)
        if kids:
            worst = min(worst, Fraction(sum(1 for k in kids if k in kept), len(kids)))
    return worst


def is_eps_subtree(sk: Skeleton, sub: Sub, kept: frozenset, eps) -> bool:
    root, nodes = sub
    T = sk.tree
    if root not in kept or not kept <= nodes:
        return False
    if any(x != root and T.parent[x] not in kept for x in kept):
        return False
    return subtree_fraction(sk, sub, kept) >= Fraction(eps)


def is_eps_good(sk: Skeleton, v: int, eps, sub: Sub | None = None) -> bool:
    sub = sub if sub is not None else whole(sk)
    if v in sk.image(sub[1]):
        return False
    closed = sk.host.rows[v] | (1 << v)
    return max_avoiding_subtree(sk, closed, sub=sub).value >= Fraction(eps)


def is_eps_nice(sk: Skeleton, u: int, eps, sub: Sub | None = None) -> bool:
    sub = sub if sub is not None else whole(sk)
    if u in sk.image(sub[1]):
        return False
    return max_avoiding_subtree(sk, keep_root_only_contact=u, sub=sub).value >= Fraction(eps)


def best_avoiding_bruteforce(sk: Skeleton, forbidden: Iterable[int], sub: Sub | None = None) -> Fraction:
    """Oracle: maximise the eps of every ancestor-closed avoiding subtree (small trees)."""
    T = sk.tree
    root, nodes = sub if sub is not None else whole(sk)
    bad = set(forbidden)
    allowed = [x for x in sorted(nodes) if sk.map[x] not in bad and x != root]
    if sk.map[root] in bad:
        return Fraction(0)
    best = Fraction(0)
    for mask in range(1 << len(allowed)):
        kept = {root} | {allowed[i] for i in range(len(allowed)) if (mask >> i) & 1}
        if any(x != root and T.parent[x] not in kept for x in kept):
            continue
        best = max(best, subtree_fraction(sk, (root, nodes), frozenset(kept)))
    return best


# ---------------------------------------------------------------------------
# counting steps
# ---------------------------------------------------------------------------


class _Ctx:
    def __init__(self, force: bool, t: int, degraded: list[str] | None = None):
        self.force = force
        self.t = t
        self.degraded = degraded if degraded is not None else []

    def check(self, ok: bool, step: str, message: str, **operands) -> None:
        if ok:
            return
        if self.force:
            self.degraded.append(f"{step}: {message}")
            return
        raise InternalInvariantError(step, message, **operands)

    def density(self, G: Graph, A: Sequence[int], B: Sequence[int], c: Fraction, step: str) -> int:
        amask, bmask = to_mask(A), to_mask(B)
        count = sum((G.rows[a] & bmask).bit_count() for a in bits(amask))
        if count > (1 - c) * len(A) * len(B):
            if not self.force and len(A) >= self.t and len(B) >= self.t:
                raise SparsenessViolation(step, A, B, count, c)
            self.check(False, step, f"pair too dense: e={count} > (1-{c})*{len(A)}*{len(B)}",
                       A=list(A), B=list(B), count=count)
        return count


@dataclass(frozen=True)
class SparseLemmaResult:
    vertex: int
    subset: tuple[int, ...]


def lemma_sparse(G: Graph, A: Iterable[int], B: Iterable[int], c) -> SparseLemmaResult:
    """For disjoint ``A, B`` with ``e(A,B) <= (1-c)|A||B|``: a vertex of ``A`` with
    at least ``c|B|`` non-neighbours in ``B``, and the set ``A'`` of vertices with
    at least ``(c/2)|B|`` of them (``|A'| >= (c/2)|A|``)."""
    c = Fraction(c)
    if not 0 < c <= 1:
        raise ParameterError("c", "must satisfy 0 < c <= 1")
    A = sorted(set(A))
    B = sorted(set(B))
    if not A or not B:
        raise ParameterError("A" if not A else "B", "must be nonempty")
    if set(A) & set(B):
        raise ParameterError("B", "A and B must be disjoint")
    bmask = to_mask(B)
    non = {a: len(B) - (G.rows[a] & bmask).bit_count() for a in A}
    count = sum(len(B) - k for k in non.values())
    if count > (1 - c) * len(A) * len(B):
        raise ParameterError("A", f"e(A,B)={count} exceeds (1-c)|A||B|")
    v = max(A, key=lambda a: (non[a], -a))
    if not non[v] >= c * len(B):  # pragma: no cover - averaging argument
        raise InternalInvariantError("lemma_sparse", "no vertex with c|B| non-neighbours")
    sub = tuple(a for a in A if non[a] >= c / 2 * len(B))
    if not len(sub) >= c / 2 * len(A):  # pragma: no cover - averaging argument
        raise InternalInvariantError("lemma_sparse", "A' too small")
    return SparseLemmaResult(v, sub)


@dataclass
class ShrinkResult:
    Y: tuple[int, ...]
    witnesses: dict            # y -> frozenset of tree nodes (an avoiding subtree)
    degraded: list[str] = field(default_factory=list)


def _shrink(G: Graph, sk: Skeleton, root: int, nodes: frozenset, X: list[int], h: int,
            c: Fraction, ctx: _Ctx) -> tuple[list[int], dict]:
    T = sk.tree
    eps = c / 4
    kids = _kids(T, nodes, root)
    if h == 0 or not kids:
        return list(X), {y: frozenset({root}) for y in X}
    if not X:
        return [], {}
    A = [sk.map[k] for k in kids]
    xmask = to_mask(X)
    ctx.density(G, A, X, c, "shrink:A-X")
    nonnb = {k: [x for x in X if not G.adjacent(sk.map[k], x)] for k in kids}
    A1 = [k for k in kids if len(nonnb[k]) >= 2 * eps * len(X)]
    ctx.check(len(A1) >= 2 * eps * len(kids), "shrink:A1", "|A1| < 2 eps |A|", A1=len(A1), A=len(kids))
    del xmask
    sub_out = {}
    for k in A1:
        Yk, Wk = _shrink(G, sk, k, _under(T, nodes, k), nonnb[k], h - 1, c, ctx)
        ctx.check(len(Yk) >= eps ** (h - 1) * len(nonnb[k]), "shrink:X'_v",
                  "|X'_v| < eps^(h-1) |X_v|", got=len(Yk), X_v=len(nonnb[k]))
        sub_out[k] = (set(Yk), Wk)
    count = {x: sum(1 for k in A1 if x in sub_out[k][0]) for x in X}
    Y = [x for x in X if count[x] > 0 and count[x] >= eps**h * len(A1)]
    ctx.check(len(Y) >= eps**h * len(X), "shrink:Y", "|Y| < eps^h |X|", Y=len(Y), X=len(X))
    wit = {}
    for u in Y:
        kept = {root}
        for k in A1:
            if u in sub_out[k][0]:
                kept |= sub_out[k][1][u]
        kept = frozenset(kept)
        closed = G.rows[u] | (1 << u)
        if any((closed >> sk.map[x]) & 1 for x in kept):  # structural
            raise InternalInvariantError("shrink", "witness subtree meets N[y]", y=u)
        ctx.check(is_eps_subtree(sk, (root, nodes), kept, 2 * eps ** (h + 1)), "shrink:witness",
                  "witness is not a 2 eps^(h+1)-subtree", y=u)
        wit[u] = kept
    return Y, wit


def sparse_shrink(G: Graph, sk: Skeleton, X: Iterable[int], c, t: int, sub: Sub | None = None,
                  force: bool = False, _ctx: _Ctx | None = None) -> ShrinkResult:
    """Shrink ``X`` to ``Y`` (``|Y| >= (c/4)^h |X|``) whose members are all
    ``2(c/4)^{h+1}``-good, with a witness subtree per member."""
    c = _check_c(c)
    if t < 1:
        raise ParameterError("t", "must be >= 1")
    ctx = _ctx or _Ctx(force, t)
    T = sk.tree
    sub = sub if sub is not None else whole(sk)
    root, nodes = sub
    h = _sub_depth(T, sub)
    X = sorted(set(X))
    img = sk.image(nodes)
    rimg = sk.map[root]
    for x in X:
        if x in img or G.adjacent(x, rimg):
            raise ParameterError("X", f"vertex {x} meets the skeleton image or N(root)")
    width = (4 / c) ** h * t
    ctx.check(all(len(_kids(T, nodes, x)) >= width for x in nodes
                  if T.height[x] - T.height[root] < h), "shrink:pre", "skeleton narrower than (4/c)^h t")
    ctx.check(len(X) >= width, "shrink:pre", "|X| < (4/c)^h t", X=len(X))
    Y, wit = _shrink(G, sk, root, nodes, X, h, c, ctx)
    return ShrinkResult(tuple(Y), wit, ctx.degraded)


# ---------------------------------------------------------------------------
# building skeletons
# ---------------------------------------------------------------------------


@dataclass
class StepResult:
    skeleton: Skeleton | None
    J: tuple[int, ...] | None
    X: tuple[int, ...]
    branch: str
    degraded: list[str] = field(default_factory=list)


def _nice_vertices(G: Graph, sk: Skeleton, c: Fraction, h: int, ctx: _Ctx) -> dict[int, frozenset]:
    """For a skeleton rooted at ``v``: vertices ``u`` that are ``2 eps^{h+1}``-nice, with witnesses."""
    T = sk.tree
    eps = c / 4
    v = sk.map[0]
    kids = list(T.children[0])
    A = [sk.map[k] for k in kids]
    B = sorted(set(G.neighbours(v)) - set(A))
    if set(B) & sk.image():
        raise InternalInvariantError("nice", "N(v) - A meets the skeleton image", v=v)
    ctx.check(len(B) >= ctx.t, "nice", "|B| < t", B=len(B))
    if not B:
        return {}
    ctx.density(G, A, B, c, "nice:A-B")
    nonnb = {k: [b for b in B if not G.adjacent(sk.map[k], b)] for k in kids}
    P = [k for k in kids if len(nonnb[k]) >= 2 * eps * len(B)]
    ctx.check(len(P) >= 2 * eps * len(A), "nice:P", "|P| < 2 eps |A|", P=len(P), A=len(A))
    nodes = frozenset(range(T.size))
    shr = {}
    for z in P:
        Bz, Wz = _shrink(G, sk, z, _under(T, nodes, z), nonnb[z], h - 1, c, ctx)
        ctx.check(len(Bz) >= eps ** (h - 1) * len(nonnb[z]), "nice:B_z", "|B_z| too small",
                  got=len(Bz), want=eps ** (h - 1) * len(nonnb[z]))
        shr[z] = (set(Bz), Wz)
    count = {b: sum(1 for z in P if b in shr[z][0]) for b in B}
    Q = [b for b in B if count[b] > 0 and count[b] >= eps**h * len(P)]
    ctx.check(len(Q) >= eps**h * len(B), "nice:Q", "|Q| < eps^h |B|", Q=len(Q), B=len(B))
    out = {}
    for u in Q:
        kept = {0}
        for z in P:
            if u in shr[z][0]:
                kept |= shr[z][1][u]
        kept = frozenset(kept)
        closed = G.rows[u] | (1 << u)
        if any((closed >> sk.map[x]) & 1 for x in kept if x != 0) or not G.adjacent(u, v):
            raise InternalInvariantError("nice", "witness meets N[u] away from the root", u=u)
        ctx.check(is_eps_subtree(sk, whole(sk), kept, 2 * eps ** (h + 1)), "nice:witness",
                  "witness is not a 2 eps^(h+1)-subtree", u=u)
        out[u] = kept
    return out


def _prune(T: RootedTree, kept: frozenset, root: int, w: int) -> list[tuple[int, int]] | None:
    """First ``w`` kept children at every kept internal node; ``(node, parent_node)`` pairs."""
    out = [(root, -1)]
    i = 0
    while i < len(out):
        x = out[i][0]
        if T.children[x]:
            kids = [k for k in T.children[x] if k in kept][:w]
            if len(kids) < w:
                return None
            out.extend((k, x) for k in kids)
        i += 1
    return out


def _assemble(G: Graph, u: int, parts: list[tuple[Skeleton, list[tuple[int, int]]]]) -> Skeleton:
    parent = [-1]
    image = [u]
    for sk, pairs in parts:
        index = {}
        for node, par in pairs:
            index[node] = len(parent)
            parent.append(0 if par == -1 else index[par])
            image.append(sk.map[node])
    return Skeleton(RootedTree(tuple(parent)), G, tuple(image))


def _outcome_two(G: Graph, X: list[int], skels: dict[int, Skeleton], c: Fraction, d, h: int,
                 W: Fraction, ctx: _Ctx) -> Skeleton | None:
    eps = c / 4
    n = G.n
    Y = [v for v in X if G.degree(v) >= Fraction(3, 2) * W]
    ctx.check(sum(G.degree(v) for v in Y) > W * n / 2, "step:Y", "sum of degrees over Y too small")
    if not Y:
        return None
    nice = {}
    for v in Y:
        nice[v] = _nice_vertices(G, skels[v], c, h, ctx)
        ctx.check(len(nice[v]) >= eps**h * G.degree(v) / 4, "step:nice", "too few nice vertices", v=v)
    pairs = sum(len(q) for q in nice.values())
    ctx.check(pairs > d * n, "step:pairs", "fewer than d|G| nice pairs", pairs=pairs)
    w = ceil(Fraction(d))
    for u in range(n):
        chosen = []
        for v in Y:
            if u in nice[v]:
                pruned = _prune(skels[v].tree, nice[v][u], 0, w)
                if pruned is None:
                    ctx.check(False, "step:prune", "nice witness is not (d,h)-wide", u=u, v=v)
                    continue
                chosen.append((skels[v], pruned))
                if len(chosen) == w:
                    break
        if len(chosen) == w:
            sk = _assemble(G, u, chosen)
            verdict = validate_skeleton(sk, d, h + 1)
            if not verdict:
                raise InternalInvariantError("step:assemble", verdict.reason, witness=verdict.witness)
            return sk
    ctx.check(False, "step:u", "no vertex is nice for ceil(d) skeletons")
    return None


def build_skeleton_step(G: Graph, c, t: int, d, h: int, force: bool = False,
                        budget: int = DEFAULT_SEARCH_BUDGET) -> StepResult:
    """Either an induced ``J`` with no ``((4/c)^{h+1} d, h)``-skeleton and
    ``d(J) >= d(G) - 2(4/c)^{h+1} d``, or a ``(d, h+1)``-skeleton.

    Forced runs try the skeleton outcome first, since at desk scale the
    degree condition of the first outcome almost always holds trivially.
    """
    c = _check_c(c)
    d = Fraction(d)
    if h < 1:
        raise ParameterError("h", "must be >= 1")
    if t < 1 or d < t:
        raise ParameterError("d", "need d >= t >= 1")
    ctx = _Ctx(force, t)
    eps = c / 4
    W = d / eps ** (h + 1)
    T = RootedTree.wide(W, h)
    search = _SkeletonSearch(G, T, budget)
    X, skels = [], {}
    for v in range(G.n):
        img = search.witness(v)
        if img is not None:
            X.append(v)
            skels[v] = Skeleton(T, G, img)
    rest = [v for v in range(G.n) if v not in skels]
    J = G.induced(rest)
    first_ok = J.half_average_degree() >= G.half_average_degree() - 2 * W if J.n else \
        0 >= G.half_average_degree() - 2 * W

    def outcome_one() -> StepResult:
        if find_skeleton_tree(J, T, budget=budget) is not None:  # pragma: no cover - by construction
            raise InternalInvariantError("step:J", "J still has a skeleton")
        return StepResult(None, tuple(rest), tuple(X), "J", ctx.degraded)

    if force:
        sk = _outcome_two(G, X, skels, c, d, h, W, ctx) if X else None
        if sk is not None:
            return StepResult(sk, None, tuple(X), "skeleton", ctx.degraded)
        if first_ok:
            return outcome_one()
        raise InternalInvariantError("step", "neither outcome could be produced")
    if first_ok:
        return outcome_one()
    sk = _outcome_two(G, X, skels, c, d, h, W, ctx)
    if sk is None:  # pragma: no cover - strict checks raise first
        raise InternalInvariantError("step", "no skeleton assembled")
    return StepResult(sk, None, tuple(X), "skeleton", ctx.degraded)


@dataclass
class GrowResult:
    skeleton: Skeleton
    degraded: list[str] = field(default_factory=list)


def grow_skeleton(G: Graph, c, t: int, d, h: int, force: bool = False,
                  budget: int = DEFAULT_SEARCH_BUDGET) -> GrowResult:
    """A ``(d, h)``-skeleton in a sparse graph with ``d(G) >= Phi(c, h) * d``."""
    c = _check_c(c)
    d = Fraction(d)
    if h < 0:
        raise ParameterError("h", "must be >= 0")
    if t < 1 or d < t:
        raise ParameterError("d", "need d >= t >= 1")
    need = phi(c, h) * d
    have = G.half_average_degree() if G.n else Fraction(0)
    if have < need and not force:
        raise HypothesisUnmetError(f"d(G)={have} < Phi(c,h)*d={need}", d_G=have, required=need)
    if G.n == 0:
        raise ParameterError("G", "empty graph")
    if h == 0:
        return GrowResult(Skeleton(RootedTree((-1,)), G, (0,)))
    w = ceil(d)
    if h == 1:
        for v in range(G.n):
            if G.degree(v) >= w:
                nb = G.neighbours(v)[:w]
                return GrowResult(Skeleton(RootedTree.wide(w, 1), G, (v, *nb)))
        raise InternalInvariantError("grow:h=1", f"no vertex of degree >= {w}", d_G=have)
    step = build_skeleton_step(G, c, t, d, h - 1, force=force, budget=budget)
    if step.skeleton is not None:
        return GrowResult(step.skeleton, step.degraded)
    raise InternalInvariantError(
        "grow", "first outcome reached, so d(J) >= Phi(c,h-1)(4/c)^h d would give a skeleton "
        "excluded from J; the host is not sparse enough", d_G=have, J_size=len(step.J or ()))


# ---------------------------------------------------------------------------
# from a skeleton to an induced tree
# ---------------------------------------------------------------------------


@dataclass
class TreeResult:
    mapping: tuple[int, ...] | None      # F-node -> host vertex
    psi: tuple[int, ...] | None          # F-node -> skeleton node
    stalled: str = ""
    degraded: list[str] = field(default_factory=list)


def _check_tree_state(G: Graph, sk: Skeleton, F: RootedTree, psi: dict, reserved: dict) -> None:
    """Structural invariants of the extension loop; failures are bugs, not bad luck."""
    done = sorted(psi)
    img = [sk.map[psi[x]] for x in done]
    if len(set(img)) != len(img):
        raise InternalInvariantError("turn", "images not distinct", psi=psi)
    for i, x in enumerate(done):
        for y in done[i + 1:]:
            tree_edge = F.parent[y] == x or F.parent[x] == y
            if G.adjacent(sk.map[psi[x]], sk.map[psi[y]]) != tree_edge:
                raise InternalInvariantError("turn", "phi o psi is not an isomorphism", pair=(x, y))
    for u, (root, nodes) in reserved.items():
        others = to_mask(sk.map[psi[x]] for x in done if x != u)
        closed = 0
        for v in bits(others):
            closed |= G.rows[v] | (1 << v)
        for node in nodes:
            if node != root and (closed >> sk.map[node]) & 1:
                raise InternalInvariantError("turn", "reserved subtree touches the mapped image", u=u)


def extract_induced_tree(G: Graph, sk: Skeleton, F: RootedTree, c, t: int,
                         force: bool = False) -> TreeResult:
    """Turn a wide skeleton into an induced copy of ``F`` (root to root)."""
    c = _check_c(c)
    if t < 1:
        raise ParameterError("t", "must be >= 1")
    T = sk.tree
    h = F.depth
    if T.depth < h:
        raise ParameterError("sk", f"skeleton depth {T.depth} < tree depth {h}")
    verdict = validate_skeleton(sk)
    if not verdict:
        raise ParameterError("sk", f"not a skeleton: {verdict.reason}")
    eps = c / 4
    a = 3 * h * F.size
    width = t / eps**a
    narrow = any(len(T.children[x]) < width for x in range(T.size) if T.height[x] < T.depth)
    if narrow and not force:
        raise HypothesisUnmetError(f"skeleton narrower than (4/c)^(3h|F|) t = {width}", width=width)
    ctx = _Ctx(force, t)
    all_nodes = frozenset(range(T.size))
    psi = {0: 0}
    reserved: dict[int, Sub] = {}
    if F.children[0]:
        reserved[0] = (0, all_nodes)

    def stall(msg: str) -> TreeResult:
        if not force:
            raise InternalInvariantError("turn", msg)
        return TreeResult(None, None, msg, ctx.degraded)

    while len(psi) < F.size:
        z = min((x for x in range(F.size) if x not in psi), key=lambda x: (F.height[x], x))
        v = F.parent[z]
        E = sorted(u for u in reserved if u != v)
        Tv_root, Tv_nodes = reserved[v]
        j = _sub_depth(T, reserved[v])
        D = _kids(T, Tv_nodes, Tv_root)
        if not D:
            return stall(f"no room below the image of F-node {v}")
        # shrink D against every other reserved subtree in turn
        Q = sorted(D, key=lambda x: sk.map[x])
        good_for: dict[int, dict] = {}
        for u in E:
            ru, nu = reserved[u]
            Xq = [sk.map[x] for x in Q]
            Yq, Wq = _shrink(G, sk, ru, nu, Xq, _sub_depth(T, reserved[u]), c, ctx)
            keep = set(Yq)
            ctx.check(len(keep) >= eps ** (h - 1) * len(Xq), "turn:Q", "shrink lost too much", u=u)
            Q = [x for x in Q if sk.map[x] in keep]
            good_for[u] = Wq
        if not Q:
            return stall("Q is empty")
        pre = {sk.map[x]: x for x in D}
        Yset = [sk.map[x] for x in Q][: (len(Q) + 1) // 2]
        Xset = [x for x in sorted(pre) if x not in set(Yset)]
        still_open = any(k not in psi and k != z for k in F.children[v])
        if Xset:
            ctx.density(G, Xset, Yset, c, "turn:X-Y")
        Xp = [x for x in Xset if sum(1 for y in Yset if not G.adjacent(x, y)) >= 2 * eps * len(Yset)]
        ctx.check(len(Xp) >= 2 * eps * len(Xset), "turn:X'", "|X'| < 2 eps |X|", Xp=len(Xp), X=len(Xset))
        shr = {}
        for x in Xp:
            node = pre[x]
            Yx_in = [y for y in Yset if not G.adjacent(x, y)]
            Yx, Wx = _shrink(G, sk, node, _under(T, Tv_nodes, node), Yx_in, j - 1, c, ctx)
            shr[x] = (set(Yx), Wx)
        count = {y: sum(1 for x in Xp if y in shr[x][0]) for y in Yset}
        need = 2 * eps**h * len(Xp)
        picks = [y for y in Yset if count[y] >= need]
        if picks:
            y = picks[0]
        else:
            ctx.check(False, "turn:y", "no y is good for 2 eps^h |X'| members of X'")
            y = max(Yset, key=lambda yy: (count[yy], -yy))
        X0 = [x for x in Xp if y in shr[x][0]]
        yprime = pre[y]
        new_reserved: dict[int, Sub] = {}
        if still_open:
            if not X0:
                return stall("X0 is empty while the parent still needs children")
            kept = {Tv_root}
            for x in X0:
                kept |= shr[x][1][y]
            new_reserved[v] = (Tv_root, frozenset(kept))
        for u in E:
            ru, nu = reserved[u]
            wit = good_for[u].get(y)
            if wit is None:  # pragma: no cover - y survived every shrink
                raise InternalInvariantError("turn", "missing witness", u=u)
            new_reserved[u] = (ru, wit)
        psi[z] = yprime
        if F.children[z]:
            new_reserved[z] = (yprime, _under(T, Tv_nodes, yprime))
        reserved = new_reserved
        _check_tree_state(G, sk, F, psi, reserved)
        target = t / eps ** (a - 2 * h * len(psi)) if a > 2 * h * len(psi) else Fraction(t)
        for u, (ru, nu) in reserved.items():
            ctx.check(all(len(_kids(T, nu, x)) >= target for x in nu if _kids(T, all_nodes, x)),
                      "turn:width", "reserved subtree below the promised width", u=u)
    mapping = tuple(sk.map[psi[x]] for x in range(F.size))
    if not verify_embedding(G, F.to_graph(), dict(enumerate(mapping))):
        raise InternalInvariantError("turn", "final map is not an induced copy of F")
    return TreeResult(mapping, tuple(psi[x] for x in range(F.size)), "", ctx.degraded)


# ---------------------------------------------------------------------------
# the whole pipeline
# ---------------------------------------------------------------------------


def tree_radius_root(F: Graph) -> tuple[int, int]:
    """``(root, radius)``: least-index vertex of minimum eccentricity."""
    if F.n == 0:
        raise ParameterError("F", "empty tree")
    best = None
    for v in range(F.n):
        dist = {v: 0}
        frontier = [v]
        while frontier:
            nxt = []
            for x in frontier:
                for y in F.neighbours(x):
                    if y not in dist:
                        dist[y] = dist[x] + 1
                        nxt.append(y)
            frontier = nxt
        ecc = max(dist.values())
        if best is None or ecc < best[1]:
            best = (v, ecc)
    return best


@dataclass
class SparseTreeResult:
    embedding: tuple[int, ...] | None     # F-vertex -> host vertex
    skeleton: Skeleton | None
    d: Fraction
    h: int
    root: int
    stalled: str = ""
    degraded: list[str] = field(default_factory=list)


def sparse_tree(G: Graph, F: Graph, c, t: int, force: bool = False, width=None,
                budget: int = DEFAULT_SEARCH_BUDGET) -> SparseTreeResult:
    """Induced copy of the tree ``F`` in a sparse graph of large average degree.

    ``width`` replaces the skeleton width ``(4/c)^{3h|F|} t`` in forced runs.
    """
    c = _check_c(c)
    if t < 1:
        raise ParameterError("t", "must be >= 1")
    root, h = tree_radius_root(F)
    if F.num_edges() != F.n - 1:
        raise ParameterError("F", "not a tree")
    Ft, order = RootedTree.from_graph(F, root)
    eps = c / 4
    avg = G.average_degree() if G.n else Fraction(0)
    need = (4 / c) ** (4 * h * F.n) * t
    if avg < need and not force:
        raise HypothesisUnmetError(f"average degree {avg} < (4/c)^(4h|F|) t = {need}",
                                   average_degree=avg, required=need,
                                   phi_margin=G.half_average_degree() - phi(c, h) * t / eps ** (3 * h * F.n))
    if width is not None and not force:
        raise ParameterError("width", "only allowed in forced runs")
    d = Fraction(width) if width is not None else t / eps ** (3 * h * F.n)
    if h == 0:
        d = max(d, Fraction(t))
    grown = grow_skeleton(G, c, t, d, h, force=force, budget=budget)
    res = extract_induced_tree(G, grown.skeleton, Ft, c, t, force=force)
    degraded = grown.degraded + res.degraded
    if res.mapping is None:
        return SparseTreeResult(None, grown.skeleton, d, h, root, res.stalled, degraded)
    emb = [0] * F.n
    for node, fv in enumerate(order):
        emb[fv] = res.mapping[node]
    if not verify_embedding(G, F, dict(enumerate(emb))):  # pragma: no cover
        raise InternalInvariantError("sparse_tree", "embedding failed revalidation")
    return SparseTreeResult(tuple(emb), grown.skeleton, d, h, root, "", degraded)
