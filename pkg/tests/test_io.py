import numpy as np
import pytest
from hypothesis import given
from strategies import simple_graphs

from graphlayout import generators as gen
from graphlayout.errors import DomainError, GraphFormatError
from graphlayout.graph import Graph
from graphlayout.io import (CSR_MAGIC, load_csr, load_edge_list, load_graph, load_metis, save_csr,
                            save_edge_list, save_graph, save_metis)


def test_edge_list_undirected_path(write):
    g = load_edge_list(write("a.txt", "0 1\n1 2\n"))
    assert (g.n, g.m) == (3, 4)
    assert g.weights is None


def test_edge_list_first_occurrence_compaction(write):
    g = load_edge_list(write("a.txt", "5 9\n9 5\n"), directed=True)
    assert (g.n, g.m) == (2, 2)
    assert g.sources().tolist() == [0, 1] and g.adjacency.tolist() == [1, 0]


def test_edge_list_weights_echo_on_both_arcs(write):
    g = load_edge_list(write("a.txt", "1 2 0.5\n"))
    assert g.weights.tolist() == [0.5, 0.5]


def test_edge_list_comments_and_blank_lines(write):
    g = load_edge_list(write("a.txt", "# c\n% c\n\n0 1\n"))
    assert g.num_edges == 1


def test_edge_list_duplicates_preserved(write):
    g = load_edge_list(write("a.txt", "0 1\n0 1\n"))
    assert g.m == 4


def test_edge_list_bad_line_reports_line_number(write):
    with pytest.raises(GraphFormatError, match="line 2"):
        load_edge_list(write("a.txt", "0 1\n0 x\n"))


def test_edge_list_negative_weight(write):
    with pytest.raises(DomainError):
        load_edge_list(write("a.txt", "0 1 -2\n"))


def test_metis_path(write):
    g = load_metis(write("a.graph", "3 2\n2\n1 3\n2\n"))
    assert g == gen.path(3)


def test_metis_asymmetric_rejected(write):
    with pytest.raises(GraphFormatError):
        load_metis(write("a.graph", "3 2\n2\n1 3\n\n"))


def test_metis_blank_line_is_isolated_vertex(write):
    g = load_metis(write("a.graph", "3 1\n2\n1\n\n"))
    assert g.n == 3 and g.degrees().tolist() == [1, 1, 0]


def test_metis_line_count_mismatch(write):
    with pytest.raises(GraphFormatError):
        load_metis(write("a.graph", "3 2\n2\n1 3\n2\n1\n"))


def test_metis_edge_weights(write):
    g = load_metis(write("a.graph", "2 1 1\n2 7\n1 7\n"))
    assert g.weights.tolist() == [7.0, 7.0]


def test_csr_header_layout(tmp_path):
    p = tmp_path / "g.csr"
    save_csr(gen.path(3), p)
    raw = p.read_bytes()
    assert raw[:6] == CSR_MAGIC
    assert np.frombuffer(raw[6:30], "<u8").tolist() == [3, 4, 0]
    assert len(raw) == 30 + 8 * 4 + 8 * 4


def test_csr_bad_magic(tmp_path):
    p = tmp_path / "g.csr"
    p.write_bytes(b"NOTCSR" + bytes(24))
    with pytest.raises(GraphFormatError):
        load_csr(p)


@given(simple_graphs(weighted=True))
def test_round_trip_all_formats(tmp_path_factory, g):
    d = tmp_path_factory.mktemp("rt")
    for fmt in ("edgelist", "metis", "csr"):
        path = d / f"g.{fmt}"
        save_graph(g, path, fmt)
        back = load_graph(path, fmt)
        if fmt == "edgelist":
            # isolated vertices cannot be expressed in an edge list
            if np.any(g.degrees() == 0):
                continue
            assert back.n == g.n and back.m == g.m
            continue
        assert back == g


def test_edge_list_round_trip_directed(tmp_path):
    g = Graph.from_arcs(3, np.array([0, 1]), np.array([1, 2]), np.array([2.5, 3.0]), directed=True)
    save_edge_list(g, tmp_path / "d.txt")
    assert load_edge_list(tmp_path / "d.txt", directed=True) == g


def test_metis_round_trip_weighted(tmp_path):
    g = gen.with_random_weights(gen.cycle(5), seed=1)
    save_metis(g, tmp_path / "c.graph")
    assert load_metis(tmp_path / "c.graph") == g
