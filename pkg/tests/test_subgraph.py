import itertools
import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from graphlayout import generators as gen
from graphlayout.analytics import TemplateTree, count_subgraphs, distribute, path_template, star_template
from graphlayout.errors import DomainError, GraphFormatError
from graphlayout.graph import Graph
from graphlayout.partition import Partition, partition_random
from graphlayout.rng import keyed_colors


def brute_embeddings(g, t):
    """Injective edge-preserving maps divided by template automorphisms (networkx)."""
    adj = set(zip(g.sources().tolist(), g.adjacency.tolist()))
    maps = sum(1 for f in itertools.permutations(range(g.n), t.k) if all((f[a], f[b]) in adj for a, b in t.edges))
    h = nx.Graph(t.edges) if t.k > 1 else nx.empty_graph(1)
    aut = sum(1 for _ in nx.algorithms.isomorphism.GraphMatcher(h, h).isomorphisms_iter())
    assert aut == t.automorphisms()
    return maps // aut


@st.composite
def trees(draw, max_k=7):
    k = draw(st.integers(1, max_k))
    parents = [draw(st.integers(0, i - 1)) for i in range(1, k)]
    return TemplateTree(k, [(p, i) for i, p in enumerate(parents, 1)])


def test_template_validation():
    with pytest.raises(DomainError):
        TemplateTree(3, [(0, 1), (1, 2), (2, 0)])
    with pytest.raises(DomainError):
        TemplateTree(4, [(0, 1), (2, 3), (0, 0)])
    with pytest.raises(DomainError):
        TemplateTree(4, [(0, 1), (1, 0), (2, 3)])


def test_template_from_file(write):
    t = TemplateTree.load(write("t.txt", "# path\n10 20\n20 30\n"))
    assert t.k == 3 and t.automorphisms() == 2
    with pytest.raises(GraphFormatError):
        TemplateTree.load(write("bad.txt", "1\n"))


@given(trees(max_k=8))
def test_automorphisms_match_networkx(t):
    h = nx.Graph(t.edges) if t.k > 1 else nx.empty_graph(1)
    aut = sum(1 for _ in nx.algorithms.isomorphism.GraphMatcher(h, h).isomorphisms_iter())
    assert t.automorphisms() == aut


@given(trees(max_k=9))
def test_decomposition_covers_template(t):
    steps = t.decomposition()
    assert len(steps) == t.k - 1
    for whole, active, passive in steps:
        assert active.vertices | passive.vertices == whole.vertices
        assert not active.vertices & passive.vertices
        assert active.root == whole.root
        assert any({whole.root, passive.root} == {a, b} for a, b in t.edges)
    if steps:
        assert steps[-1][0].vertices == frozenset(range(t.k))


def test_triangle_three_path_mean_within_ten_percent():
    g = gen.cycle(3)
    assert brute_embeddings(g, path_template(3)) == 3
    est, tr = count_subgraphs(distribute(g, partition_random(g, 2, 0)), path_template(3), 1000, seed=5)
    assert abs(est - 3) <= 0.3
    assert tr.conserved()


def test_single_edge_exact():
    g = gen.gnm(25, 60, seed=1)
    est, tr = count_subgraphs(distribute(g, partition_random(g, 3, 1)), path_template(2), 5, seed=1)
    assert est == g.num_edges
    assert tr.meta["estimates"] == [60.0] * 5


def test_single_vertex_template():
    g = gen.cycle(5)
    est, _ = count_subgraphs(distribute(g, partition_random(g, 2, 0)), TemplateTree(1, []), 3)
    assert est == 5


def test_template_larger_than_graph():
    g = gen.path(3)
    est, _ = count_subgraphs(distribute(g, partition_random(g, 1, 0)), path_template(4), 3)
    assert est == 0


def test_template_too_large():
    g = gen.path(20)
    with pytest.raises(DomainError):
        count_subgraphs(distribute(g, partition_random(g, 1, 0)), path_template(13), 1)


def test_directed_graph_rejected():
    g = Graph.from_arcs(3, np.array([0, 1]), np.array([1, 2]), directed=True)
    with pytest.raises(DomainError):
        count_subgraphs(distribute(g, partition_random(g, 1, 0)), path_template(2), 1)


def test_colorful_probability_matches_closed_form():
    k, iters = 4, 4000
    keys = np.array([3, 17, 40, 99])
    hits = sum(len(set(keyed_colors(keys, k, 11, it).tolist())) == k for it in range(iters))
    prob = math.factorial(k) / k ** k
    sigma = math.sqrt(prob * (1 - prob) / iters)
    assert abs(hits / iters - prob) <= 3 * sigma


def test_estimate_unbiased_on_small_graph():
    g = gen.gnm(10, 20, seed=2)
    t = star_template(4)
    truth = brute_embeddings(g, t)
    est, _ = count_subgraphs(distribute(g, partition_random(g, 2, 3)), t, 1500, seed=9)
    assert abs(est - truth) <= 0.1 * truth


def test_estimate_identical_across_layouts():
    g = gen.gnm(15, 35, seed=6)
    t = path_template(4)
    ref, _ = count_subgraphs(distribute(g, partition_random(g, 1, 0)), t, 30, seed=4)
    perm = np.random.default_rng(1).permutation(g.n)
    from graphlayout.graph import apply_ordering

    h = apply_ordering(g, perm)
    keys = np.empty(g.n, dtype=np.int64)
    keys[perm] = np.arange(g.n)
    part = Partition.from_assignment(h, np.arange(g.n) % 3, 3)
    est, _ = count_subgraphs(distribute(h, part, keys), t, 30, seed=4)
    assert abs(est - ref) <= 1e-9 * max(1.0, ref)


def test_exchange_volume_is_rows_times_colour_sets():
    g = gen.cycle(6)
    dg = distribute(g, Partition.from_assignment(g, np.array([0, 0, 0, 1, 1, 1]), 2))
    _, tr = count_subgraphs(dg, path_template(3), 1, seed=0)
    widths = [math.comb(3, passive.size) for _, _, passive in path_template(3).decomposition()]
    assert [int(ph.sent.sum()) for ph in tr.phases] == [4 * w for w in widths]
