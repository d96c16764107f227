import json
from fractions import Fraction

import pytest

from ramseychi.errors import ParameterError
from ramseychi.graph import Petersen, corpus, generate
from ramseychi.harness import (
    CSV_FIELDS, LITERATURE, ScanReport, check_spec, extremal_search, load_report_json, parse_source, report_csv,
    report_emit, report_json, scan,
)
from ramseychi.graph6 import write_graph6


def test_check_spec_defaults_and_ranges():
    spec = check_spec("cocktailks")
    assert spec.label() == "cocktailks(m=1,s=2,k=5)"
    assert check_spec("cocktailks", m=2).get("m") == 2
    with pytest.raises(ParameterError):
        check_spec("cocktailks", s=1)
    with pytest.raises(ParameterError):
        check_spec("nope")


def test_cocktailks_n7():
    rep = scan(corpus(7), [check_spec("cocktailks")])
    assert rep.count("FAIL") == 0 and rep.count("ERROR") == 0
    assert rep.count("PASS") == rep.hypothesis_count() > 0


def test_petersen_eps_dense_report():
    rep = scan([generate(Petersen())], [check_spec("eps-chi-dense-report", eps=Fraction(1, 3))])
    (row,) = rep.rows
    assert row.verdict == "REPORT" and "false" in row.detail.lower()


def test_kssparse_small():
    rep = scan(corpus(6), [check_spec("kssparse")])
    assert rep.count("FAIL") == 0 and rep.count("PASS") > 0


def test_empty_csv_and_json_roundtrip():
    empty = ScanReport()
    assert report_csv(empty) == ",".join(CSV_FIELDS) + "\n"
    rep = scan([generate(Petersen())], [check_spec("cocktailks")])
    back = load_report_json(report_json(rep))
    assert back.rows == rep.rows
    assert report_json(back) == report_json(rep)


def test_rationals_emitted_as_fractions():
    rep = scan(corpus(4), [check_spec("avgdeg-degeneracy")])
    doc = json.loads(report_json(rep))
    margins = [r["margin"] for r in doc["rows"] if r["margin"] is not None]
    assert margins and all(isinstance(m, str) and "." not in m for m in margins)


def test_report_emit_errors(tmp_path):
    rep = ScanReport()
    with pytest.raises(ParameterError):
        report_emit(rep, "xml")
    with pytest.raises(OSError) as ei:
        report_emit(rep, "csv", tmp_path / "missing" / "x.csv")
    assert "missing" in str(ei.value)
    out = tmp_path / "r.csv"
    report_emit(rep, "csv", out)
    assert out.read_text().startswith("index,graph6")


def test_fail_rows_replay_alone():
    rep = scan(corpus(5), [check_spec("literature-sanity")])
    for row in rep.rows:
        again = scan(parse_source(f"graph6:{row.graph6}"), [check_spec("literature-sanity")])
        assert again.rows[0].verdict == row.verdict


def test_parallel_scan_matches_serial():
    checks = [check_spec("cocktailks"), check_spec("kssparse")]
    a = scan(corpus(6), checks)
    b = scan(corpus(6), checks, workers=2, chunk=40)
    assert report_json(a) == report_json(b)


def test_sources():
    assert len(list(parse_source("enum:4"))) == 1 + 1 + 2 + 4 + 11
    assert [write_graph6(G) for G in parse_source("random:8,1/2,3,2")] == \
        [write_graph6(G) for G in parse_source("random:8,1/2,3,2")]
    with pytest.raises(ParameterError):
        list(parse_source("random:8,1/2"))
    with pytest.raises(ParameterError):
        parse_source("web:x")


def test_extremal_examples():
    res = extremal_search([], "p5c4-5x/4")
    assert res.top == [] and res.examined == 0
    res = extremal_search(corpus(7), "p5c4-5x/4", top_k=3)
    assert res.top and all(e.ratio <= 1 for e in res.top)
    a = extremal_search(parse_source("random:9,1/2,5,20"), "p5-ghm")
    b = extremal_search(parse_source("random:9,1/2,5,20"), "p5-ghm")
    assert a == b
    part = extremal_search(corpus(6), "p5-ghm", budget=10)
    assert part.partial and part.examined == 10


def test_literature_registry_is_declarative():
    assert {"p5c4-5x/4", "p5-ghm", "evenhole"} <= set(LITERATURE)
    assert LITERATURE["p5c4-5x/4"].bound(4) == 5
