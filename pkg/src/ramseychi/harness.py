"""Corpus scans, literature cross-checks, extremal search and reports.

A scan runs a list of checks over a stream of graphs and produces one row
per (graph, check).  Verdicts:

``PASS`` / ``FAIL``
    the check's hypothesis held and its conclusion held / did not;
``NA``
    the hypothesis (freeness side-condition or chromatic threshold) did not hold;
``REPORT``
    a measurement with nothing to assert;
``ERROR``
    a capability or parameter error, recorded with its message.

Every row carries the graph6 string, so any row can be replayed alone.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil
from pathlib import Path as FilePath
from typing import Callable, Iterable, Iterator, Sequence

from .detectors import find_induced, is_even_hole_free
from .errors import CapabilityError, ParameterError, RamseyChiError
from .extraction import (
    broom_extract,
    gyarfas_extract,
    revalidate,
    stablechi_extract,
    threshold,
)
from .graph import (
    Broom,
    CocktailMulti,
    Complete,
    CompleteBipartite,
    Cycle,
    Graph,
    Path,
    Random,
    corpus,
    disjoint_union,
    generate,
)
from .graph6 import iter_graph_file, parse_any, write_graph6
from .invariants import exact_invariants, is_ct_sparse, is_eps_chi_dense, ramsey

CHECK_IDS = (
    "cocktailks",
    "broomks-threshold",
    "path2-conditional",
    "stablechi-conditional",
    "kssparse",
    "avgdeg-degeneracy",
    "eps-chi-dense-report",
    "gyarfas-soundness-fuzz",
    "literature-sanity",
)

_DEFAULTS: dict[str, dict[str, object]] = {
    "cocktailks": {"m": 1, "s": 2, "k": 5},
    "broomks-threshold": {"k": 3, "l": 2, "s": 2, "q": 1},
    "path2-conditional": {"s": 2, "q": 1, "k": 5},
    "stablechi-conditional": {"s": 2, "q": 1},
    "kssparse": {"s": 2},
    "avgdeg-degeneracy": {"s": 2},
    "eps-chi-dense-report": {"eps": Fraction(1, 3)},
    "gyarfas-soundness-fuzz": {"s": 2, "q": 1, "k": 5},
    "literature-sanity": {"entry": "all"},
}

_MINIMA = {"m": 1, "s": 2, "k": 2, "l": 1, "q": 1}


@dataclass(frozen=True)
class CheckSpec:
    id: str
    params: tuple[tuple[str, object], ...] = ()

    def get(self, name: str):
        return dict(self.params)[name]

    def label(self) -> str:
        inner = ",".join(f"{k}={_fmt(v)}" for k, v in self.params)
        return f"{self.id}({inner})"


def check_spec(check_id: str, **params) -> CheckSpec:
    """Validated :class:`CheckSpec` with defaults filled in."""
    if check_id not in _DEFAULTS:
        raise ParameterError("check", f"unknown check {check_id!r}; expected one of {CHECK_IDS}")
    merged = dict(_DEFAULTS[check_id])
    for key, value in params.items():
        if key not in merged:
            raise ParameterError(key, f"not a parameter of {check_id}")
        merged[key] = value
    for key, value in merged.items():
        if key == "eps":
            merged[key] = value = Fraction(value)
            if value <= 0:
                raise ParameterError("eps", "must be positive")
        elif key == "entry":
            if value != "all" and value not in LITERATURE:
                raise ParameterError("entry", f"unknown registry entry {value!r}")
        else:
            if not isinstance(value, int) or value < _MINIMA[key]:
                raise ParameterError(key, f"must be an integer >= {_MINIMA[key]}, got {value!r}")
    if check_id in ("path2-conditional", "gyarfas-soundness-fuzz") and merged["k"] < 5:
        raise ParameterError("k", "the path argument needs k >= 5")
    if check_id == "cocktailks" and merged["k"] < 3:
        raise ParameterError("k", "must be >= 3")
    return CheckSpec(check_id, tuple(merged.items()))


# ---------------------------------------------------------------------------
# literature registry (cited bounds, cross-check only)
# ---------------------------------------------------------------------------


def _minus_edge(m: int) -> Graph:
    G = generate(Complete(m))
    return Graph.from_edges(m, [e for e in G.edges() if e != (0, 1)])


def _wheel4() -> Graph:
    return Graph.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 0), (4, 0), (4, 1), (4, 2), (4, 3)])


@dataclass(frozen=True)
class LiteratureBound:
    """``chi <= bound(omega)`` on graphs free of every pattern (and passing ``extra``)."""

    key: str
    citation: str
    patterns: tuple[Graph, ...]
    bound: Callable[[int], Fraction]
    description: str
    extra: Callable[[Graph], bool] | None = None

    def applies(self, G: Graph) -> bool:
        if any(find_induced(G, P) is not None for P in self.patterns):
            return False
        return self.extra is None or self.extra(G)


def _registry() -> dict[str, LiteratureBound]:
    P5, P6, P7 = (generate(Path(k)) for k in (5, 6, 7))
    C4, C5 = generate(Cycle(4)), generate(Cycle(5))
    entries = [
        LiteratureBound("p5c4-3x/2", "Fouquet-Giakoumakis-Maire-Thuillier 1995", (P5, C4),
                        lambda w: Fraction(3 * w, 2), "{P5,C4}-free: 3x/2"),
        LiteratureBound("p5c4-5x/4", "Brause-Geisser-Schiermeyer 2022", (P5, C4),
                        lambda w: Fraction(ceil(Fraction(5 * w - 1, 4))), "{P5,C4}-free: ceil((5x-1)/4)"),
        LiteratureBound("p5k5minus", "Char-Karthick 2025", (P5, _minus_edge(5)),
                        lambda w: Fraction(max(7, w)), "{P5,K5-}-free: max(7,x)"),
        LiteratureBound("p5wheel4", "Char-Karthick 2022", (P5, _wheel4()),
                        lambda w: Fraction(3 * w, 2), "{P5,4-wheel}-free: 3x/2"),
        LiteratureBound("p3p2wheel4", "Wu-Li-Li 2025",
                        (disjoint_union([generate(Path(3)), generate(Path(2))]), _wheel4()),
                        lambda w: Fraction(2 * w), "{P3+P2,4-wheel}-free: 2x"),
        LiteratureBound("p6c4-3x/2", "Gaspers-Huang 2019", (P6, C4),
                        lambda w: Fraction(3 * w, 2), "{P6,C4}-free: 3x/2"),
        LiteratureBound("p6c4-5x/4", "Karthick-Maffray 2019", (P6, C4),
                        lambda w: Fraction(ceil(Fraction(5 * w, 4))), "{P6,C4}-free: ceil(5x/4)"),
        LiteratureBound("p7c4c5-3x/2", "Cameron-Huang-Penev-Sivaraman 2020", (P7, C4, C5),
                        lambda w: Fraction(3 * w, 2), "{P7,C4,C5}-free: 3x/2"),
        LiteratureBound("p7c4c5-11x/9", "Huang 2024", (P7, C4, C5),
                        lambda w: Fraction(ceil(Fraction(11 * w, 9))), "{P7,C4,C5}-free: ceil(11x/9)"),
        LiteratureBound("p7evenhole", "Huang-Zhou-Chang 2026", (P7,),
                        lambda w: Fraction(ceil(Fraction(5 * w, 4))), "P7-free even-hole-free: ceil(5x/4)",
                        is_even_hole_free),
        LiteratureBound("evenhole", "Chudnovsky-Seymour 2019", (),
                        lambda w: Fraction(2 * w - 1), "even-hole-free: 2x-1", is_even_hole_free),
        LiteratureBound("forkc4", "Chudnovsky-Huang-Karthick-Kaufmann 2021", (generate(Broom(3, 2)), C4),
                        lambda w: Fraction(ceil(Fraction(3 * w, 2))), "{fork,C4}-free: ceil(3x/2)"),
        LiteratureBound("p5-ghm", "Gravier-Hoang-Maffray 2003", (P5,),
                        lambda w: Fraction(3) ** (w - 1) if w >= 1 else Fraction(0), "P5-free: 3^(x-1)"),
    ]
    return {e.key: e for e in entries}


LITERATURE = _registry()


# ---------------------------------------------------------------------------
# rows and reports
# ---------------------------------------------------------------------------

CSV_FIELDS = ("index", "graph6", "n", "m", "chi", "omega", "alpha", "degeneracy",
              "check", "verdict", "hypothesis", "margin", "detail")


@dataclass(frozen=True)
class ScanRow:
    index: int
    graph6: str
    n: int
    m: int
    chi: int | None
    omega: int | None
    alpha: int | None
    degeneracy: int | None
    check: str
    verdict: str
    hypothesis: bool
    margin: Fraction | None
    detail: str

    def as_dict(self) -> dict:
        return {
            "index": self.index, "graph6": self.graph6, "n": self.n, "m": self.m,
            "chi": self.chi, "omega": self.omega, "alpha": self.alpha, "degeneracy": self.degeneracy,
            "check": self.check, "verdict": self.verdict, "hypothesis": self.hypothesis,
            "margin": _fmt(self.margin) if self.margin is not None else None, "detail": self.detail,
        }


@dataclass
class ScanReport:
    rows: list[ScanRow] = field(default_factory=list)
    checks: list[str] = field(default_factory=list)

    def count(self, verdict: str, check: str | None = None) -> int:
        return sum(1 for r in self.rows if r.verdict == verdict and (check is None or r.check == check))

    @property
    def failures(self) -> list[ScanRow]:
        return [r for r in self.rows if r.verdict == "FAIL"]

    def hypothesis_count(self, check: str | None = None) -> int:
        return sum(1 for r in self.rows if r.hypothesis and (check is None or r.check == check))

    def summary(self) -> dict:
        out = {}
        for label in self.checks:
            rows = [r for r in self.rows if r.check == label]
            best = max((r for r in rows if r.margin is not None),
                       key=lambda r: (r.margin, -r.index), default=None)
            out[label] = {
                "graphs": len(rows),
                "hypothesis_satisfied": sum(1 for r in rows if r.hypothesis),
                **{v: sum(1 for r in rows if r.verdict == v) for v in ("PASS", "FAIL", "NA", "REPORT", "ERROR")},
                "max_margin": _fmt(best.margin) if best else None,
                "max_margin_graph6": best.graph6 if best else None,
            }
        return out


def _fmt(value) -> str:
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    return str(value)


def _free(G: Graph, patterns: Sequence[Graph]) -> bool:
    return all(find_induced(G, P) is None for P in patterns)


def _run_check(G: Graph, spec: CheckSpec, inv) -> tuple[str, bool, Fraction | None, str]:
    """``(verdict, hypothesis, margin, detail)`` for one graph and one check."""
    chi, omega = inv.chi, inv.omega
    cid = spec.id
    if cid == "cocktailks":
        m, s, k = spec.get("m"), spec.get("s"), spec.get("k")
        if not _free(G, [generate(Path(k)), generate(CocktailMulti(m, s))]):
            return "NA", False, None, "contains P_k or the cocktail graph"
        thr = threshold("CocktailKS", m=m, s=s, k=k, omega=omega)
        margin = Fraction(chi) / thr.value
        ok = chi < thr.value
        return ("PASS" if ok else "FAIL"), True, margin, f"chi={chi} threshold={_fmt(thr.value)}"
    if cid == "broomks-threshold":
        k, l, s, q = (spec.get(x) for x in ("k", "l", "s", "q"))
        thr = threshold("BroomKS", k=k, l=l, s=s, q=q, omega=omega)
        margin = Fraction(chi) / thr.value
        if chi < thr.value:
            return "NA", False, margin, f"chi={chi} < {_fmt(thr.value)}"
        res = broom_extract(G, k, l, s, q)
        ok = res.kind in ("RichStableSet", "TreeEmbedding") and revalidate(G, res.certificate, s=s)
        return ("PASS" if ok else "FAIL"), True, margin, res.kind
    if cid == "path2-conditional":
        s, q, k = spec.get("s"), spec.get("q"), spec.get("k")
        thr = threshold("Path2", s=s, k=k, q=q, omega=omega)
        margin = Fraction(chi) / thr.value
        if chi < thr.value:
            return "NA", False, margin, f"chi={chi} < {_fmt(thr.value)}"
        res = gyarfas_extract(G, s, q, k)
        ok = res.kind in ("RichStableSet", "InducedPathWitness") and revalidate(G, res.certificate, s=s)
        return ("PASS" if ok else "FAIL"), True, margin, res.kind
    if cid == "stablechi-conditional":
        s, q = spec.get("s"), spec.get("q")
        if G.n == 0:
            return "NA", False, None, "null graph"
        thr = threshold("StableChi", s=s, q=q, alpha=inv.alpha, omega=omega)
        margin = Fraction(chi) / thr.value if thr.value else None
        if chi < thr.value:
            return "NA", False, margin, f"chi={chi} < {_fmt(thr.value)}"
        res = stablechi_extract(G, s, q)
        ok = res.kind == "RichStableSet" and revalidate(G, res.certificate, s=s)
        return ("PASS" if ok else "FAIL"), True, margin, res.kind
    if cid == "kssparse":
        s = spec.get("s")
        if find_induced(G, CompleteBipartite(s, s)) is not None:
            return "NA", False, None, "contains K_{s,s}"
        c, t = Fraction(1, 4 * s), 2 * ramsey(s, omega + 1).value
        verdict = is_ct_sparse(G, c, t)
        detail = f"c={_fmt(c)} t={t}"
        if not verdict.sparse:
            detail += f" A={list(verdict.A)} B={list(verdict.B)} e={verdict.count}"
        return ("PASS" if verdict.sparse else "FAIL"), True, None, detail
    if cid == "avgdeg-degeneracy":
        s = spec.get("s")
        if find_induced(G, CompleteBipartite(s, s)) is not None:
            return "NA", False, None, "contains K_{s,s}"
        R = ramsey(s, omega + 1).value
        return "REPORT", True, Fraction(inv.degeneracy + 1, R), f"(degeneracy+1)/R = {inv.degeneracy + 1}/{R}"
    if cid == "eps-chi-dense-report":
        eps = spec.get("eps")
        dv = is_eps_chi_dense(G, eps)
        detail = f"dense={str(dv.dense).lower()}"
        if not dv.dense:
            detail += f" vertex={dv.vertex} chi_nonneighbours={dv.chi_nonneighbours}"
        margin = Fraction(dv.chi_nonneighbours, chi) if dv.chi_nonneighbours is not None and chi else None
        return "REPORT", True, margin, detail
    if cid == "gyarfas-soundness-fuzz":
        s, q, k = spec.get("s"), spec.get("q"), spec.get("k")
        res = gyarfas_extract(G, s, q, k, force=True)
        ok = revalidate(G, res.certificate, s=s)
        return ("PASS" if ok else "FAIL"), True, None, res.kind
    if cid == "literature-sanity":
        key = spec.get("entry")
        if G.n == 0:
            return "NA", False, None, "null graph"
        entries = list(LITERATURE.values()) if key == "all" else [LITERATURE[key]]
        applied, failed, margin = [], [], None
        for e in entries:
            if not e.applies(G):
                continue
            applied.append(e.key)
            b = e.bound(omega)
            if b > 0:
                r = Fraction(chi) / b
                margin = r if margin is None else max(margin, r)
            if chi > b:
                failed.append(e.key)
        if not applied:
            return "NA", False, None, "no registry entry applies"
        detail = "failed=" + ";".join(failed) if failed else "applied=" + ";".join(applied)
        return ("FAIL" if failed else "PASS"), True, margin, detail
    raise ParameterError("check", f"unknown check {cid!r}")  # pragma: no cover


def scan_graph(index: int, G: Graph, checks: Sequence[CheckSpec]) -> list[ScanRow]:
    g6 = write_graph6(G)
    try:
        inv = exact_invariants(G)
    except RamseyChiError as exc:
        return [ScanRow(index, g6, G.n, G.num_edges(), None, None, None, None, spec.label(), "ERROR",
                        False, None, f"{type(exc).__name__}: {exc}") for spec in checks]
    rows = []
    for spec in checks:
        try:
            verdict, hyp, margin, detail = _run_check(G, spec, inv)
        except (CapabilityError, ParameterError) as exc:
            verdict, hyp, margin, detail = "ERROR", False, None, f"{type(exc).__name__}: {exc}"
        except RamseyChiError as exc:
            verdict, hyp, margin, detail = "FAIL", True, None, f"{type(exc).__name__}: {exc}"
        rows.append(ScanRow(index, g6, G.n, G.num_edges(), inv.chi, inv.omega, inv.alpha,
                            inv.degeneracy, spec.label(), verdict, hyp, margin, detail))
    return rows


def _scan_chunk(args) -> list[ScanRow]:
    start, graphs, checks = args
    out = []
    for offset, G in enumerate(graphs):
        out.extend(scan_graph(start + offset, G, checks))
    return out


def scan(source: Iterable[Graph], checks: Sequence[CheckSpec], workers: int = 1,
         chunk: int = 256) -> ScanReport:
    """Run every check on every graph; rows ordered by (graph index, check order)."""
    checks = list(checks)
    report = ScanReport(checks=[c.label() for c in checks])
    if workers <= 1:
        for i, G in enumerate(source):
            report.rows.extend(scan_graph(i, G, checks))
        return report
    graphs = list(source)
    jobs = [(i, graphs[i:i + chunk], checks) for i in range(0, len(graphs), chunk)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for rows in pool.map(_scan_chunk, jobs):   # map preserves order
            report.rows.extend(rows)
    return report


# ---------------------------------------------------------------------------
# sources
# ---------------------------------------------------------------------------


def parse_source(text: str) -> Iterator[Graph]:
    """``enum:N`` (all graphs on at most N vertices), ``file:path``,
    ``random:n,p,seed,count`` or ``graph6:<string>``."""
    kind, _, arg = text.partition(":")
    if kind == "enum":
        try:
            n = int(arg)
        except ValueError:
            raise ParameterError("source", f"bad order in {text!r}") from None
        return corpus(n)
    if kind == "file":
        return iter_graph_file(arg)
    if kind == "random":
        parts = arg.split(",")
        if len(parts) != 4:
            raise ParameterError("source", "random source is random:n,p,seed,count")
        try:
            n, p, seed, count = int(parts[0]), Fraction(parts[1]), int(parts[2]), int(parts[3])
        except ValueError:
            raise ParameterError("source", f"bad random source {text!r}") from None
        return (generate(Random(n, p, seed + i)) for i in range(count))
    if kind == "graph6":
        return iter([parse_any(arg)])
    raise ParameterError("source", f"unknown source {text!r}")


# ---------------------------------------------------------------------------
# extremal search
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExtremalEntry:
    ratio: Fraction
    graph6: str
    chi: int
    omega: int
    bound: Fraction


@dataclass
class ExtremalResult:
    top: list[ExtremalEntry]
    examined: int
    eligible: int
    partial: bool


def extremal_search(family: Iterable[Graph], bound: str | CheckSpec, top_k: int = 5,
                    budget: int | None = None) -> ExtremalResult:
    """The ``top_k`` graphs maximising ``chi / bound(omega)`` among those the bound applies to.

    ``bound`` is a literature registry key or a ``cocktailks`` check.
    Ties break by graph6 string.  Stopping at ``budget`` graphs flags the
    result as partial.
    """
    if isinstance(bound, CheckSpec):
        if bound.id != "cocktailks":
            raise ParameterError("bound", "extremal search supports registry keys and cocktailks")
        m, s, k = bound.get("m"), bound.get("s"), bound.get("k")
        patterns = [generate(Path(k)), generate(CocktailMulti(m, s))]
        applies = lambda G: _free(G, patterns)  # noqa: E731
        value = lambda w: threshold("CocktailKS", m=m, s=s, k=k, omega=w).value  # noqa: E731
    else:
        if bound not in LITERATURE:
            raise ParameterError("bound", f"unknown registry entry {bound!r}")
        entry = LITERATURE[bound]
        applies, value = entry.applies, entry.bound
    found: list[ExtremalEntry] = []
    examined = eligible = 0
    partial = False
    for G in family:
        if budget is not None and examined >= budget:
            partial = True
            break
        examined += 1
        if G.n == 0 or not applies(G):
            continue
        eligible += 1
        inv = exact_invariants(G)
        b = Fraction(value(inv.omega))
        if b <= 0:
            continue
        found.append(ExtremalEntry(Fraction(inv.chi) / b, write_graph6(G), inv.chi, inv.omega, b))
    found.sort(key=lambda e: (-e.ratio, e.graph6))
    return ExtremalResult(found[:top_k], examined, eligible, partial)


# ---------------------------------------------------------------------------
# emission
# ---------------------------------------------------------------------------


def report_json(report: ScanReport) -> str:
    doc = {"checks": report.checks, "rows": [r.as_dict() for r in report.rows], "summary": report.summary()}
    return json.dumps(doc, indent=1) + "\n"


def report_csv(report: ScanReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for r in report.rows:
        d = r.as_dict()
        writer.writerow(["" if d[f] is None else str(d[f]).lower() if isinstance(d[f], bool) else d[f]
                         for f in CSV_FIELDS])
    return buf.getvalue()


def report_emit(report: ScanReport, fmt: str, path: str | FilePath | None = None) -> str:
    """Serialise as ``json`` or ``csv``; write to ``path`` when given. Returns the text."""
    if fmt == "json":
        text = report_json(report)
    elif fmt == "csv":
        text = report_csv(report)
    else:
        raise ParameterError("format", f"expected json or csv, got {fmt!r}")
    if path is not None:
        try:
            FilePath(path).write_text(text)
        except OSError as exc:
            raise OSError(f"cannot write report to {path}: {exc}") from exc
    return text


def load_report_json(text: str) -> ScanReport:
    """Inverse of :func:`report_json` (margins come back as Fractions)."""
    doc = json.loads(text)
    rows = []
    for d in doc["rows"]:
        margin = Fraction(d["margin"]) if d["margin"] is not None else None
        rows.append(ScanRow(d["index"], d["graph6"], d["n"], d["m"], d["chi"], d["omega"], d["alpha"],
                            d["degeneracy"], d["check"], d["verdict"], d["hypothesis"], margin, d["detail"]))
    return ScanReport(rows, list(doc["checks"]))
