import math

import pytest

import dnmetl

DAY = 86400


def test_edge_weight_curve():
    assert dnmetl.edge_weight(0) == 1.0
    assert dnmetl.edge_weight(7 * DAY) == pytest.approx(0.2, abs=1e-15)
    assert dnmetl.edge_weight(30 * DAY) == pytest.approx(0.2, abs=1e-15)
    e3 = math.exp(3)
    assert dnmetl.edge_weight(int(3.5 * DAY)) == pytest.approx(0.2 + 0.8 * (math.exp(1.5) - 1) / (e3 - 1), abs=1e-12)
    with pytest.raises(dnmetl.UsageError):
        dnmetl.edge_weight(0, omega_lower=1.5)


def test_parse_duration():
    assert dnmetl.parse_duration("7d") == 7 * DAY
    assert dnmetl.parse_duration("7 days") is None


def test_topic_edges():
    edges = dnmetl.topic_edges(9, [(1, 10, 0), (2, 20, 3600), (3, 30, 7200)])
    assert len(edges) == 5
    assert sum(e["to_first"] for e in edges) == 2
    assert all(e["tid"] == 9 for e in edges)


def test_graph_stats_and_components():
    nodes = [1, 2, 3, 4, 5]
    edges = [(1, 2, 1.0), (2, 3, 0.5), (3, 1, 0.25), (3, 4, 1.0)]
    stats = dnmetl.graph_stats(nodes, edges)
    assert stats["Nodes"] == "5"
    assert stats["Isolated nodes"] == "1"
    ids, wcc, scc, clustering = dnmetl.components(nodes, edges)
    assert ids == nodes
    assert wcc == [0, 0, 0, 0, -1]
    assert scc == [0, 0, 0, 1, -1]
    assert clustering[0] == 1.0


def test_hidden_and_rank():
    assert dnmetl.estimate_hidden(40, 30, 0) == (10, "25.0")
    assert dnmetl.estimate_hidden(560023, 514256) == (45767, "8.2")
    assert dnmetl.check_rank("Level 1", 25, date="2014-09-01") == "SalesExceedRange"
    assert dnmetl.check_rank("Freshman", 5, date="2014-03-01") == "Inconsistent"


def test_match_users():
    rows = dnmetl.match_users([(1, "a"), (2, "b")], [(7, "a"), (8, "c")])
    assert rows == [(1, "a", 1, 7), (None, "b", 2, None), (None, "c", None, 8)]


def test_pipeline_on_synthetic_corpus(tmp_path):
    summary = dnmetl.generate_corpus(tmp_path / "c", seed=2)
    assert summary["files"] > 0
    done = dnmetl.run(tmp_path / "c" / "pipeline.conf")
    assert [s for s, _, _ in done] == ["ingest", "extract", "resolve", "match", "network", "stats", "quality"]
    for table in ["forum/post.tsv", "market/vendors.tsv", "forum-market/user-matching.tsv"]:
        got = (tmp_path / "c" / "out" / table).read_bytes()
        assert got == (tmp_path / "c" / "manifest" / table).read_bytes()
    again = dnmetl.run(tmp_path / "c" / "pipeline.conf")
    assert all(skipped for _, skipped, _ in again)
    with pytest.raises(dnmetl.UsageError):
        dnmetl.run(tmp_path / "c" / "pipeline.conf", stages=["nope"])
