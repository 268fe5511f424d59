import os

import leaksem

ROOT = os.environ["LEAKSEM_SOURCE_DIR"]
LISTING1 = os.path.join(ROOT, "corpus", "cases", "event_ordering_lowmem.aml")


def test_analyze_file_finds_the_imei_leak():
    flows = leaksem.analyze_file(LISTING1)
    assert len(flows) == 2
    leaks = [f for f in flows if f["sensitive"]]
    assert len(leaks) == 1
    assert leaks[0]["carriedTaint"] == ["IMEI"]
    assert leaks[0]["urlTemplate"] == "gongfu188.com<IMEI>"


def test_analyze_source_matches_analyze_file():
    with open(LISTING1, encoding="utf-8") as fh:
        src = fh.read()
    assert leaksem.analyze_source(src) == leaksem.analyze_file(LISTING1)


def test_sink_reach_mode_flags_the_untainted_flow():
    flows = leaksem.analyze_file(LISTING1, mode="sink-reach")
    assert any(f["sensitive"] and not f["carriedTaint"] for f in flows)


def test_tokenize_url_protects_placeholders():
    toks = leaksem.tokenize_url("gad.ju6666.com/GetAd?&lo=(.*)&la=(.*)", "./?&=:_,;")
    assert "(.*)" in toks
    assert "ju6666" in toks
    assert "GetAd" in toks


def test_graph_dot():
    dot = leaksem.graph_dot(open(LISTING1, encoding="utf-8").read())
    assert "digraph" in dot
    assert "onCreate" in dot
