"""Stable sets with high-chromatic common neighbourhood.

The procedures here turn the Gyárfás-path argument, its broom variant and
the pigeonhole lemma over a maximum stable set into algorithms.  Each one
returns a :class:`Certificate` that :func:`revalidate` can check from
scratch.

Runs below a theorem threshold are allowed with ``force=True``.  The proof
guarantees are then gone, so numeric invariants that fail are recorded in
``degraded`` and the run carries on as long as the structural invariants
(induced path, anticompleteness) hold.  When the hypothesis is met, the
same failures raise :class:`InternalInvariantError`.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb, floor
from typing import Union

from .detectors import find_induced, is_induced_path, verify_embedding
from .errors import CapabilityError, InternalInvariantError, ParameterError
from .graph import Broom, Graph, Path, bits, generate, to_mask
from .invariants import (
    _chi_rows,
    chi_of,
    chromatic_number,
    clique_number,
    components,
    find_stable_set,
    is_a_connected,
    is_stable,
    iter_stable_sets,
    maximum_stable_set,
    ramsey,
)

# ---------------------------------------------------------------------------
# thresholds
# ---------------------------------------------------------------------------

THRESHOLD_KINDS = ("CocktailKS", "Path2", "BroomKS", "StableChi", "KappaChi")


@dataclass(frozen=True)
class Threshold:
    kind: str
    params: tuple[tuple[str, int], ...]
    value: Fraction
    exact: bool = True

    def param(self, name: str) -> int:
        return dict(self.params)[name]


def _need(name: str, value: int, minimum: int) -> None:
    if not isinstance(value, int) or value < minimum:
        raise ParameterError(name, f"must be an integer >= {minimum}, got {value!r}")


def threshold(kind: str, **p: int) -> Threshold:
    """Exact value of a theorem threshold.

    ``CocktailKS(m,s,k,omega)``, ``Path2(s,k,q,omega)``,
    ``BroomKS(k,l,s,q,omega)``, ``StableChi(s,q,alpha,omega)`` and
    ``KappaChi(a)``.  ``exact`` is False when a Ramsey value used is only
    the binomial upper bound.
    """
    exact = True

    def R(s: int, w: int) -> int:
        nonlocal exact
        rv = ramsey(s, w)
        exact = exact and rv.exact
        return rv.value

    if kind == "CocktailKS":
        m, s, k, w = p["m"], p["s"], p["k"], p["omega"]
        _need("m", m, 1), _need("s", s, 2), _need("k", k, 3), _need("omega", w, 0)
        value = Fraction(2 * s ** (k - 3)) ** (m - 1) * (4 * s + 1) * R(s, w + 1)
        names = ("m", "s", "k", "omega")
    elif kind == "Path2":
        s, k, q, w = p["s"], p["k"], p["q"], p["omega"]
        _need("s", s, 2), _need("k", k, 5), _need("q", q, 1), _need("omega", w, 0)
        value = Fraction(s ** (k - 3) * (2 * q + 7 * s * R(s, w + 1) - 7 * s))
        names = ("s", "k", "q", "omega")
    elif kind == "BroomKS":
        k, l, s, q, w = p["k"], p["l"], p["s"], p["q"], p["omega"]
        _need("k", k, 2), _need("l", l, 1), _need("s", s, 2), _need("q", q, 1), _need("omega", w, 0)
        value = Fraction(7 * s**k * l ** (s + 1) * (q + R(s, w + 1)))
        names = ("k", "l", "s", "q", "omega")
    elif kind == "StableChi":
        s, q, al, w = p["s"], p["q"], p["alpha"], p["omega"]
        _need("s", s, 2), _need("q", q, 0), _need("alpha", al, 0), _need("omega", w, 0)
        value = Fraction(comb(al, s) * q + al ** (s - 1) * R(s, w + 1))
        names = ("s", "q", "alpha", "omega")
    elif kind == "KappaChi":
        a = p["a"]
        _need("a", a, 1)
        value = Fraction(4 * a - 1)
        names = ("a",)
    else:
        raise ParameterError("kind", f"unknown threshold {kind!r}; expected one of {THRESHOLD_KINDS}")
    return Threshold(kind, tuple((n, p[n]) for n in names), value, exact)


# ---------------------------------------------------------------------------
# arithmetic of the iteration over m and of the f-sequence
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CocktailChain:
    """Constants of the induction over ``m`` and the bound it yields."""

    a: int
    R: int
    c: Fraction
    bounds: tuple[Fraction, ...]   # a^{m-1}(R-1+c) - c for m = 1..M
    steps_ok: tuple[bool, ...]     # per m >= 2: the path step lands under the bound
    final_ok: bool                 # R-1+c <= (1+4s)(R-1)


def cocktail_chain(s: int, k: int, omega: int, M: int) -> CocktailChain:
    """Replay the induction over ``m = 1..M`` in exact arithmetic.

    For each ``m >= 2`` the step sets ``q = floor(previous bound)`` and
    checks ``a*(q + 7sR/2 - 7s/2) <= a^{m-1}(R-1+c) - c``, where the left
    side is ``a/(2 s^{k-3})`` times the path threshold with that ``q``.
    """
    _need("s", s, 2), _need("k", k, 5), _need("M", M, 1)
    a = 2 * s ** (k - 3)
    R = ramsey(s, omega + 1).value
    c = Fraction(7 * a * s * (R - 1), 2 * (a - 1))
    if -c != a * (Fraction(7, 2) * s * R - Fraction(7, 2) * s - c):
        raise InternalInvariantError("cocktail-c", "defining identity of c fails", a=a, R=R, c=c)
    bounds = [Fraction(a) ** (m - 1) * (R - 1 + c) - c for m in range(1, M + 1)]
    steps = []
    for m in range(2, M + 1):
        q = floor(bounds[m - 2])
        lhs = a * (q + Fraction(7, 2) * s * R - Fraction(7, 2) * s)
        # the path threshold is s^{k-3}(2q + 7sR - 7s) = lhs exactly
        path2 = Fraction(s ** (k - 3) * (2 * q + 7 * s * R - 7 * s))
        steps.append(lhs == path2 and lhs <= bounds[m - 1])
    final_ok = R - 1 + c <= (1 + 4 * s) * (R - 1)
    return CocktailChain(a, R, c, tuple(bounds), tuple(steps), final_ok)


def f_sequence(chi: int, s: int, q: int, a: int, length: int) -> list[Fraction]:
    """``f(1), ..., f(length)`` from ``f(1) = (chi-q-2a)/s`` and the recurrence."""
    f = [Fraction(chi - q - 2 * a, s)]
    for _ in range(1, length):
        f.append((f[-1] - (q + 3 * a)) / s)
    return f


def f_identity_holds(fvals: list[Fraction], s: int, q: int, a: int) -> bool:
    """``f(i) + r = s^{1-i}(f(1) + r)`` with ``r = (q+3a)/(s-1)`` for every entry."""
    r = Fraction(q + 3 * a, s - 1)
    return all(fv + r == Fraction(1, s ** i) * (fvals[0] + r) for i, fv in enumerate(fvals))


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RichStableSet:
    S: tuple[int, ...]
    common: tuple[int, ...]
    chi_common: int
    q: int
    kind: str = "RichStableSet"


@dataclass(frozen=True)
class InducedPathWitness:
    vertices: tuple[int, ...]
    k: int
    kind: str = "InducedPathWitness"


@dataclass(frozen=True)
class TreeEmbedding:
    """``mapping[i]`` is the host image of vertex ``i`` of ``pattern``."""

    mapping: tuple[int, ...]
    pattern: Graph
    label: str = ""
    kind: str = "TreeEmbedding"


@dataclass(frozen=True)
class AlphaExceeds:
    a: int
    witness: tuple[int, ...]   # a stable set of size a + 1
    kind: str = "AlphaExceeds"


@dataclass(frozen=True)
class HypothesisUnmet:
    threshold: Threshold
    actual_chi: int
    kind: str = "HypothesisUnmet"


@dataclass(frozen=True)
class Stalled:
    """A forced run reached a step whose guarantee does not hold."""

    step: str
    reason: str
    kind: str = "Stalled"


Certificate = Union[RichStableSet, InducedPathWitness, TreeEmbedding, AlphaExceeds, HypothesisUnmet, Stalled]


@dataclass
class ExtractionState:
    path: tuple[int, ...]
    J: tuple[int, ...]
    L: tuple[int, ...] = ()
    Z: tuple[int, ...] = ()
    b: Fraction | None = None


@dataclass
class ExtractionResult:
    certificate: Certificate
    s: int = 2
    q: int = 1
    a: int = 0
    r: Fraction = Fraction(0)
    R: int = 0
    ramsey_exact: bool = True
    hypothesis_met: bool = False
    fvals: list[Fraction] = field(default_factory=list)
    trace: list[ExtractionState] = field(default_factory=list)
    degraded: list[str] = field(default_factory=list)

    @property
    def kind(self) -> str:
        return self.certificate.kind


def rich_certificate(G: Graph, S, q: int) -> RichStableSet | None:
    """Build a RichStableSet on ``S`` if its common neighbourhood has ``chi > q``."""
    S = tuple(sorted(S))
    common = G.common_neighbourhood_mask(to_mask(S))
    k = chi_of(G, common)
    if k > q:
        return RichStableSet(S, tuple(bits(common)), k, q)
    return None


def revalidate(G: Graph, cert: Certificate, *, s: int | None = None) -> bool:
    """Independent check of a certificate against ``G``.

    Chromatic numbers are recomputed on a freshly built induced subgraph,
    and pattern witnesses are checked against a freshly generated pattern.
    """
    if isinstance(cert, RichStableSet):
        if s is not None and len(cert.S) != s:
            return False
        if len(set(cert.S)) != len(cert.S) or not is_stable(G, cert.S):
            return False
        common = sorted(set(range(G.n)).difference(cert.S))
        common = [v for v in common if all(G.adjacent(v, x) for x in cert.S)]
        if tuple(common) != cert.common:
            return False
        k = chromatic_number(G.induced(common))
        return k == cert.chi_common and k > cert.q
    if isinstance(cert, InducedPathWitness):
        return len(cert.vertices) == cert.k and is_induced_path(G, cert.vertices) \
            and find_induced(G.induced(cert.vertices), Path(cert.k)) is not None
    if isinstance(cert, TreeEmbedding):
        return verify_embedding(G, cert.pattern, dict(enumerate(cert.mapping)))
    if isinstance(cert, AlphaExceeds):
        return len(cert.witness) == cert.a + 1 and len(set(cert.witness)) == len(cert.witness) \
            and is_stable(G, cert.witness)
    if isinstance(cert, HypothesisUnmet):
        return chromatic_number(G) == cert.actual_chi and cert.actual_chi < cert.threshold.value
    if isinstance(cert, Stalled):
        return True
    return False


# ---------------------------------------------------------------------------
# brute-force oracle
# ---------------------------------------------------------------------------


def find_rich_stable_set_bruteforce(G: Graph, s: int, q: int) -> RichStableSet | None:
    """Lexicographically least stable ``s``-set whose common neighbourhood has ``chi > q``."""
    _need("s", s, 1)
    for S in iter_stable_sets(G, s):
        cert = rich_certificate(G, S, q)
        if cert is not None:
            return cert
    return None


# ---------------------------------------------------------------------------
# highly connected subgraphs
# ---------------------------------------------------------------------------

HC_EXACT_MAX = 12
HC_SPLIT_BUDGET = 2000


@dataclass(frozen=True)
class HCResult:
    vertices: tuple[int, ...]
    chi: int
    strategy: str


def _core(G: Graph, mask: int, d: int) -> int:
    """Largest subset of ``mask`` in which every vertex has degree >= d."""
    changed = True
    while changed and mask:
        changed = False
        for v in bits(mask):
            if (G.rows[v] & mask).bit_count() < d:
                mask &= ~(1 << v)
                changed = True
    return mask


def hc_subgraph(G: Graph, a: int, mask: int | None = None) -> HCResult | None:
    """An ``(a+1)``-connected induced subgraph ``F`` of ``G[mask]`` with
    ``chi(F) >= chi(G[mask]) - 2a + 1``.

    Greedy peel first: restrict to the ``(a+1)``-core, split each piece
    along a small separator into ``side ∪ cutset`` parts (higher-chi part
    first) and keep the first piece that is connected enough and chromatic
    enough.  Exact subset search follows for cores of at most
    ``HC_EXACT_MAX`` vertices.  ``None`` means not found; when
    ``chi >= 4a - 1`` the object is guaranteed to exist, so failure raises
    :class:`CapabilityError` instead.
    """
    _need("a", a, 1)
    if mask is None:
        mask = G.full_mask
    chi = chi_of(G, mask)
    target = chi - 2 * a + 1
    guaranteed = chi >= 4 * a - 1

    def ok(m: int) -> bool:
        return chi_of(G, m) >= target and bool(is_a_connected(G.induced_mask(m), a + 1))

    core = _core(G, mask, a + 1)
    stack = [core] if core else []
    seen: set[int] = set()
    budget = HC_SPLIT_BUDGET
    while stack and budget:
        budget -= 1
        m = stack.pop()
        m = _core(G, m, a + 1)
        if not m or m in seen or m.bit_count() <= a + 1 or chi_of(G, m) < target:
            continue
        seen.add(m)
        sub = G.induced_mask(m)
        verdict = is_a_connected(sub, a + 1)
        if verdict:
            return HCResult(tuple(bits(m)), chi_of(G, m), "peel")
        verts = list(bits(m))
        cut = to_mask(verts[i] for i in verdict.cutset)
        parts = []
        if verdict.side_a or verdict.side_b:
            side_a = to_mask(verts[i] for i in verdict.side_a)
            rest = m & ~cut & ~side_a
            for part in components(G, rest):
                parts.append(part | cut)
            parts.append(side_a | cut)
        parts = [p for p in parts if p != m]
        parts.sort(key=lambda p: (chi_of(G, p), -p))  # stack: best popped first
        stack.extend(parts)

    if core and core.bit_count() <= HC_EXACT_MAX:
        verts = list(bits(core))
        for size in range(len(verts), a + 1, -1):
            for combo in combinations(verts, size):
                m = to_mask(combo)
                if ok(m):
                    return HCResult(tuple(combo), chi_of(G, m), "exact")
    if guaranteed:
        raise CapabilityError(f"hc_subgraph: no ({a + 1})-connected piece found although chi={chi} >= {4 * a - 1}")
    return None


def _max_chi_component(G: Graph, mask: int) -> int:
    best, best_key = 0, None
    for comp in components(G, mask):
        key = (chi_of(G, comp), comp.bit_count(), -comp)
        if best_key is None or key > best_key:
            best, best_key = comp, key
    return best


# ---------------------------------------------------------------------------
# pigeonhole over a maximum stable set
# ---------------------------------------------------------------------------


def stablechi_extract(G: Graph, s: int, q: int, a_opt: int | None = None) -> ExtractionResult:
    """Stable ``s``-set with rich common neighbourhood inside a maximum stable set.

    With ``a_opt`` the size form is tried first: if ``|G|`` reaches
    ``a*C(a,s)*q + a^s*R`` and ``alpha(G) > a``, the answer is
    ``AlphaExceeds(a)``.
    """
    _need("s", s, 2), _need("q", q, 1)
    if G.n == 0:
        raise ParameterError("G", "the null graph is outside the lemma (its threshold is 0)")
    omega = clique_number(G)
    rv = ramsey(s, omega + 1)
    R = rv.value
    S = maximum_stable_set(G)
    alpha = len(S)
    if a_opt is not None:
        _need("a", a_opt, 1)
        size_bound = a_opt * comb(a_opt, s) * q + a_opt**s * R
        if G.n >= size_bound and alpha > a_opt:
            cert = AlphaExceeds(a_opt, tuple(S[: a_opt + 1]))
            return ExtractionResult(cert, R=R, ramsey_exact=rv.exact, hypothesis_met=True)
    thr = threshold("StableChi", s=s, q=q, alpha=alpha, omega=omega)
    chi = chromatic_number(G)
    met = chi >= thr.value
    for I in combinations(S, s):
        cert = rich_certificate(G, I, q)
        if cert is not None:
            return ExtractionResult(cert, R=R, ramsey_exact=rv.exact, hypothesis_met=met)
    if met:
        raise InternalInvariantError("stablechi", "no rich s-subset of a maximum stable set",
                                     chi=chi, threshold=thr.value, S=S)
    return ExtractionResult(HypothesisUnmet(thr, chi), R=R, ramsey_exact=rv.exact)


# ---------------------------------------------------------------------------
# the path argument
# ---------------------------------------------------------------------------


def _shortest_path(G: Graph, allowed: int, sources: int, targets: int) -> list[int] | None:
    """Lexicographically least shortest path inside ``allowed`` from ``sources`` to ``targets``."""
    sources &= allowed
    targets &= allowed
    if not sources or not targets:
        return None
    dist = {v: 0 for v in bits(targets)}
    frontier = deque(bits(targets))
    while frontier:
        v = frontier.popleft()
        for w in bits(G.rows[v] & allowed):
            if w not in dist:
                dist[w] = dist[v] + 1
                frontier.append(w)
    reach = [v for v in bits(sources) if v in dist]
    if not reach:
        return None
    start = min(reach, key=lambda v: (dist[v], v))
    path = [start]
    while dist[path[-1]]:
        here = path[-1]
        path.append(min(w for w in bits(G.rows[here] & allowed) if dist.get(w) == dist[here] - 1))
    return path


class _Run:
    """Shared bookkeeping of one run of the path argument."""

    def __init__(self, G: Graph, strict: bool, result: ExtractionResult):
        self.G = G
        self.strict = strict
        self.result = result

    def degrade(self, step: str, message: str, **operands) -> None:
        if self.strict:
            raise InternalInvariantError(step, message, **operands)
        self.result.degraded.append(f"{step}: {message}")

    def stall(self, step: str, reason: str) -> ExtractionResult:
        if self.strict:
            raise InternalInvariantError(step, reason)
        self.result.certificate = Stalled(step, reason)
        return self.result

    def hc(self, mask: int, a: int, step: str) -> int:
        try:
            found = hc_subgraph(self.G, a, mask)
        except CapabilityError:
            if self.strict:
                raise
            found = None
        if found is not None:
            return to_mask(found.vertices)
        self.degrade(step, f"no ({a + 1})-connected piece with the chromatic guarantee; using max-chi component")
        return _max_chi_component(self.G, mask)


def _path_argument(G: Graph, s: int, q: int, R: int, conn: int, a: int, thr: Threshold,
                   force: bool, finish, result: ExtractionResult, z_limit: int) -> ExtractionResult:
    """Common loop for paths and brooms.

    ``conn`` is the connectivity and degree demand on ``J`` (``R`` for
    paths, ``B`` for brooms).  ``finish(path, J)`` returns a certificate or
    None and is consulted at the top of every round.
    """
    chi = chromatic_number(G)
    met = chi >= thr.value
    result.hypothesis_met = met
    if not met and not force:
        result.certificate = HypothesisUnmet(thr, chi)
        return result
    run = _Run(G, met, result)
    rows = G.rows
    fvals = result.fvals

    def f(i: int) -> Fraction:
        if len(fvals) < i:
            fvals[:] = f_sequence(chi, s, q, a, i)
        return fvals[i - 1]

    F = run.hc(G.full_mask, a, "F")
    if not F:
        return run.stall("F", "empty graph")
    S = find_stable_set(G, s, F)
    if S is None:
        return run.stall("S", f"no stable {s}-set in F")
    Fg = G.induced_mask(F)
    fverts = list(bits(F))
    commonF = Fg.common_neighbourhood_mask(to_mask(fverts.index(v) for v in S))
    if _chi_rows(Fg.induced_mask(commonF).rows)[0] > q:
        cert = rich_certificate(G, S, q)
        if cert is not None:
            result.certificate = cert
            return result

    def chi_minus_nbhd(v: int) -> int:
        return chi_of(G, F & ~rows[v])

    v = max(S, key=lambda x: (chi_minus_nbhd(x), -x))
    path = [v]
    J = F & ~(1 << v)
    p = 1
    if not chi_minus_nbhd(v) > f(1):
        run.degrade("start", "chi(F - N(v)) <= f(1)", f1=f(1))

    while True:
        result.trace.append(ExtractionState(tuple(path), tuple(bits(J))))
        cert = finish(path, J)
        if cert is not None:
            result.certificate = cert
            return result
        end = path[-1]
        if not is_a_connected(G.induced_mask(J), conn):
            run.degrade("J", f"J is not {conn}-connected", p=p)
        if (rows[end] & J).bit_count() < conn:
            run.degrade("J", f"v_p has fewer than {conn} neighbours in J", p=p)
        Jm = J & ~rows[end]
        if not chi_of(G, Jm) > f(p):
            run.degrade("J", "chi(J - N(v_p)) <= f(p)", p=p, fp=f(p))
        if not Jm:
            return run.stall("L", "J - N(v_p) is empty")
        L = run.hc(Jm, a, "L")
        b = f(p + 1) + conn - 1
        Z = 0
        for z in bits(J):
            if chi_of(G, L & ~rows[z]) <= b:
                Z |= 1 << z
        state = result.trace[-1]
        state.L, state.Z, state.b = tuple(bits(L)), tuple(bits(Z)), b
        if Z.bit_count() >= z_limit:
            for T in iter_stable_sets(G, s, Z):
                cert = rich_certificate(G, T, q)
                if cert is not None:
                    result.certificate = cert
                    return result
            run.degrade("Z", f"|Z| >= {z_limit} but no stable {s}-set in Z is rich")
        P = _shortest_path(G, J & ~Z, rows[end] & J, L)
        if P is None:
            return run.stall("path", "no Z-avoiding path from N(v_p) to L")
        w = P[-2]
        if (rows[w] & L).bit_count() < conn:
            new, expected = P, L & ~rows[w]
        else:
            new, expected = P[:-1], L
        # the new J must stay anticomplete to every path vertex but the last
        Jn = L
        for x in new[:-1]:
            Jn &= ~rows[x]
        if Jn != expected:
            run.degrade("J'", "interior path vertices see L inside Z; J' shrunk to keep anticompleteness")
        path.extend(new)
        J = Jn & ~to_mask(path)
        p = len(path)
        if not is_induced_path(G, path):  # structural; cannot fail
            raise InternalInvariantError("path", "extended path is not induced", path=path)
        for x in path[:-1]:
            if rows[x] & J:
                raise InternalInvariantError("path", "path not anticomplete to J", path=path)


def gyarfas_extract(G: Graph, s: int, q: int, k: int, force: bool = False) -> ExtractionResult:
    """Path argument for ``P_k``-free graphs: a rich stable ``s``-set or an induced ``P_k``."""
    _need("s", s, 2), _need("k", k, 5), _need("q", q, 1)
    omega = clique_number(G)
    rv = ramsey(s, omega + 1)
    R = rv.value
    a = s * (R - 1)
    thr = threshold("Path2", s=s, k=k, q=q, omega=omega)
    result = ExtractionResult(Stalled("init", ""), s=s, q=q, a=a, r=Fraction(q + 3 * a, s - 1), R=R,
                              ramsey_exact=rv.exact)
    rows = G.rows

    def finish(path: list[int], J: int):
        p = len(path)
        if p >= k:
            return InducedPathWitness(tuple(path[-k:]), k)
        if p < k - 2:
            return None
        end = path[-1]
        near = J & rows[end]
        far = J & ~rows[end]
        for x in bits(near):
            if p == k - 1:
                return InducedPathWitness(tuple(path) + (x,), k)
            ys = rows[x] & far
            if ys:
                return InducedPathWitness(tuple(path) + (x, (ys & -ys).bit_length() - 1), k)
        return None

    out = _path_argument(G, s, q, R, R, a, thr, force, finish, result, R)
    _check(G, out)
    return out


def broom_extract(G: Graph, k: int, l: int, s: int, q: int, force: bool = False) -> ExtractionResult:
    """Broom variant: a rich stable ``s``-set or an induced ``(k, l)``-broom."""
    _need("k", k, 2), _need("l", l, 1), _need("s", s, 2), _need("q", q, 1)
    omega = clique_number(G)
    rv = ramsey(s, omega + 1)
    R = rv.value
    B = l * comb(l, s) * q + l**s * R
    a = s * (B - 1)
    thr = threshold("BroomKS", k=k, l=l, s=s, q=q, omega=omega)
    result = ExtractionResult(Stalled("init", ""), s=s, q=q, a=a, r=Fraction(q + 3 * a, s - 1), R=R,
                              ramsey_exact=rv.exact)
    rows = G.rows
    pattern = Broom(k, l)

    def finish(path: list[int], J: int):
        if len(path) < k:
            return None
        nb = rows[path[-1]] & J
        verts = list(bits(nb))
        H = G.induced_mask(nb)
        inner = stablechi_extract(H, s, q, a_opt=l) if H.n else None
        if inner is not None and isinstance(inner.certificate, RichStableSet):
            S = [verts[i] for i in inner.certificate.S]
            cert = rich_certificate(G, S, q)
            if cert is not None:
                return cert
        I = find_stable_set(G, l, nb)
        if I is None:
            return None
        # broom vertex 0 is the centre, 1..k-1 the handle, k.. the leaves
        handle = path[-2::-1][: k - 1]
        return TreeEmbedding(tuple([path[-1], *handle, *I]), generate(pattern), f"Broom({k},{l})")

    out = _path_argument(G, s, q, R, B, a, thr, force, finish, result, R)
    _check(G, out)
    return out


def _check(G: Graph, result: ExtractionResult) -> None:
    if not revalidate(G, result.certificate, s=result.s):
        raise InternalInvariantError("revalidate", f"{result.kind} certificate failed revalidation",
                                     certificate=result.certificate)
    if result.fvals and not f_identity_holds(result.fvals, result.s, result.q, result.a):
        raise InternalInvariantError("f-sequence", "f(i)+r = s^(1-i)(f(1)+r) fails")
