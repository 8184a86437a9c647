from fractions import Fraction

import networkx as nx
import numpy as np
import pytest
from conftest import to_nx, undirected
from hypothesis import given
from strategies import permutations, simple_graphs
from hypothesis import strategies as st

from graphlayout import generators as gen
from graphlayout.errors import DomainError
from graphlayout.graph import (Graph, apply_ordering, approx_diameter, bfs_levels, component_labels,
                               degree_stats, preprocess, symmetrize)


def test_csr_invariants_hold_for_path():
    g = gen.path(3)
    assert g.n == 3 and g.m == 4 and g.num_edges == 2
    assert g.row_offsets.tolist() == [0, 1, 3, 4]
    assert g.adjacency.tolist() == [1, 0, 2, 1]
    g.validate()


def test_arrays_are_read_only():
    g = gen.path(3)
    with pytest.raises(ValueError):
        g.adjacency[0] = 2


def test_validate_rejects_asymmetric_undirected():
    g = Graph.from_arcs(2, np.array([0]), np.array([1]), directed=False)
    with pytest.raises(DomainError):
        g.validate()


def test_degree_stats_on_star():
    st_ = degree_stats(gen.star(4), diameter=True)
    assert st_.d_avg == Fraction(8, 5)
    assert st_.d_max == 4
    assert st_.approx_diameter == 2


def test_approx_diameter_path():
    assert approx_diameter(gen.path(7)) == 6


def test_bfs_levels_multi_source_depth_limit():
    lv = bfs_levels(gen.path(6), [0, 5], max_depth=1)
    assert lv.tolist() == [0, 1, -1, -1, 1, 0]


def test_preprocess_keeps_larger_min_id_tie_break():
    g = undirected(7, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    out, id_map = preprocess(g)
    assert out.n == 3 and out.num_edges == 3
    assert id_map.tolist() == [0, 1, 2, -1, -1, -1, -1]


def test_preprocess_collapses_multi_edges():
    g = Graph.from_arcs(2, np.array([0, 0, 1, 1, 0, 1]), np.array([1, 1, 0, 0, 1, 0]))
    out, _ = preprocess(g)
    assert out.m == 2


def test_preprocess_drops_self_loops_and_isolated():
    g = undirected(4, [(0, 1), (1, 2)])
    g = Graph.from_arcs(4, np.concatenate([g.sources(), [1]]), np.concatenate([g.adjacency, [1]]))
    out, id_map = preprocess(g)
    assert out.m == 4 and id_map[3] == -1
    assert not np.any(out.sources() == out.adjacency)


def test_preprocess_cycle_unchanged():
    g = gen.cycle(6)
    out, id_map = preprocess(g)
    assert out == g and id_map.tolist() == list(range(6))


def test_preprocess_empty_result_raises():
    g = Graph.from_arcs(2, np.array([0]), np.array([0]))
    with pytest.raises(DomainError):
        preprocess(g)


def test_preprocess_keeps_weak_component_of_directed():
    g = Graph.from_arcs(5, np.array([0, 1, 3]), np.array([1, 2, 4]), directed=True)
    out, _ = preprocess(g)
    assert out.n == 3 and out.m == 2 and out.directed


def test_symmetrize_directed_path():
    g = Graph.from_arcs(3, np.array([0, 1]), np.array([1, 2]), directed=True)
    s = symmetrize(g)
    assert not s.directed and s.m == 4 and s.is_symmetric()


def test_symmetrize_weight_copy_and_min():
    g = Graph.from_arcs(3, np.array([0, 1, 2]), np.array([1, 0, 1]), np.array([3.0, 5.0, 7.0]), directed=True)
    s = symmetrize(g)
    w = {(a, b): c for a, b, c in zip(s.sources().tolist(), s.adjacency.tolist(), s.weights.tolist())}
    assert w[(0, 1)] == w[(1, 0)] == 3.0
    assert w[(1, 2)] == w[(2, 1)] == 7.0


def test_apply_ordering_reverses_path():
    g = gen.path(3)
    r = apply_ordering(g, np.array([2, 1, 0]))
    assert r == g


def test_apply_ordering_rejects_non_bijection():
    with pytest.raises(DomainError):
        apply_ordering(gen.path(3), np.array([0, 0, 1]))


def test_component_labels_match_networkx():
    g = gen.gnm(40, 30, seed=2)
    labels = component_labels(g)
    for comp in nx.connected_components(to_nx(g)):
        assert len({labels[v] for v in comp}) == 1
    assert len(set(labels.tolist())) == nx.number_connected_components(to_nx(g))


@given(simple_graphs())
def test_symmetrize_idempotent(g):
    s = symmetrize(g)
    assert symmetrize(s) == s
    assert s == symmetrize(g)


@given(simple_graphs(min_n=2))
def test_preprocess_idempotent(g):
    if g.m == 0:
        return
    once, _ = preprocess(g)
    twice, id_map = preprocess(once)
    assert twice == once
    assert id_map.tolist() == list(range(once.n))
    assert len(set(component_labels(once).tolist())) == 1


@given(st.data())
def test_apply_ordering_preserves_structure(data):
    g = data.draw(simple_graphs(min_n=1, max_n=10, weighted=True))
    perm = data.draw(permutations(g.n))
    r = apply_ordering(g, perm)
    assert r.n == g.n and r.m == g.m
    assert sorted(r.degrees().tolist()) == sorted(g.degrees().tolist())
    assert len(set(component_labels(r).tolist())) == len(set(component_labels(g).tolist()))
    assert nx.is_isomorphic(to_nx(r), to_nx(g))
    assert np.array_equal(r.degrees()[perm], g.degrees())
    root = 0
    assert sorted(bfs_levels(r, [perm[root]]).tolist()) == sorted(bfs_levels(g, [root]).tolist())
    r.validate()
