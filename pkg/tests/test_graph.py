import os

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from socialcloud.graph import (
    GraphFormatError,
    degree,
    from_edges,
    graph_stats,
    largest_component,
    load_graph,
    write_edgelist,
)
from surrogates import SNAPSHOTS, real_snapshot


def write(tmp_path, text, name="g.txt"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_dedup_and_self_loops(tmp_path):
    g = load_graph(write(tmp_path, "1 2\n2 1\n1 1\n"))
    assert (g.node_count, g.edge_count) == (2, 1)


def test_comments_and_string_labels(tmp_path):
    g = load_graph(write(tmp_path, "# comment\na b\n"))
    assert (g.node_count, g.edge_count) == (2, 1)
    assert g.labels == ("a", "b")
    assert g.id_of("a") == 0 and g.id_of("b") == 1


def test_numeric_labels_sort_numerically(tmp_path):
    g = load_graph(write(tmp_path, "10 2\n2 9\n"))
    assert g.labels == (2, 9, 10)
    assert sorted(g.neighbors(g.id_of(2)).tolist()) == [g.id_of(9), g.id_of(10)]


def test_directed_input_is_symmetrised(tmp_path):
    g = load_graph(write(tmp_path, "0 1\n1 2\n"))
    assert g.neighbors(1).tolist() == [0, 2]
    assert g.neighbors(0).tolist() == [1]


def test_malformed_line_reports_line_number(tmp_path):
    path = write(tmp_path, "0 1\n# ok\n1 2 3\n")
    with pytest.raises(GraphFormatError, match=":3:"):
        load_graph(path)


def test_unreadable_and_empty(tmp_path):
    with pytest.raises(GraphFormatError):
        load_graph(tmp_path / "missing.txt")
    with pytest.raises(GraphFormatError):
        load_graph(write(tmp_path, "# nothing\n\n"))
    with pytest.raises(GraphFormatError):
        load_graph(write(tmp_path, "3 3\n"))


def test_degree_examples():
    star = from_edges([(0, 1), (0, 2), (0, 3), (0, 4)], n=6)
    assert degree(star, 5) == 0
    assert degree(star, 0) == 4
    assert degree(star, 1) == 1
    with pytest.raises(IndexError):
        degree(star, 6)


def test_stats_examples():
    tri = graph_stats(from_edges([(0, 1), (1, 2), (0, 2)]))
    assert (tri.n, tri.m, tri.density) == (3, 3, 1.0)
    path = from_edges([(0, 1), (1, 2)])
    assert path.degrees().tolist() == [1, 2, 1]
    assert graph_stats(path).mean_degree == pytest.approx(4 / 3)


def test_largest_component():
    g = from_edges([(0, 1), (1, 2), (3, 4)], n=6)
    lcc = largest_component(g)
    assert (lcc.node_count, lcc.edge_count) == (3, 2)
    assert lcc.labels == (0, 1, 2)


edge_lists = st.lists(st.tuples(st.integers(0, 30), st.integers(0, 30)), min_size=1, max_size=120)


@settings(max_examples=60, deadline=None)
@given(edge_lists)
def test_symmetric_dedup_loop_free(edges):
    g = from_edges(edges)
    expected = {frozenset(e) for e in edges if e[0] != e[1]}
    got = set()
    for v in range(g.node_count):
        nbrs = g.neighbors(v).tolist()
        assert nbrs == sorted(set(nbrs))
        assert v not in nbrs
        for w in nbrs:
            assert v in g.neighbors(w).tolist()
            got.add(frozenset((v, w)))
    assert got == expected
    assert g.edge_count == len(expected)


@settings(max_examples=30, deadline=None)
@given(edge_lists)
def test_round_trip(tmp_path_factory, edges):
    edges = [e for e in edges if e[0] != e[1]]
    if not edges:
        return
    g = load_graph(write(tmp_path_factory.mktemp("g"), "".join(f"{a} {b}\n" for a, b in edges)))
    path = tmp_path_factory.mktemp("rt") / "out.txt"
    write_edgelist(g, path)
    again = load_graph(path)
    assert again == g
    assert again.labels == g.labels


def test_load_is_deterministic(tmp_path):
    rng = np.random.default_rng(3)
    text = "".join(f"n{a} n{b}\n" for a, b in rng.integers(0, 200, size=(800, 2)))
    path = write(tmp_path, text)
    a, b = load_graph(path), load_graph(path)
    assert a == b and a.labels == b.labels


@pytest.mark.skipif(not os.environ.get("SOCIALCLOUD_DATA"), reason="public snapshots not available")
@pytest.mark.parametrize("name", ["wiki", "epinion"])
def test_published_snapshot_sizes(name):
    g = real_snapshot(name)
    if g is None:
        pytest.skip(f"{SNAPSHOTS[name].snap_file} not in SOCIALCLOUD_DATA")
    snap = SNAPSHOTS[name]
    assert (g.node_count, g.edge_count) == (snap.n, snap.m)
