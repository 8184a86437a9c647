import itertools
import math

import networkx as nx
import numpy as np
import oracle
import pytest
from conftest import undirected
from hypothesis import given
from hypothesis import strategies as st
from strategies import graph_and_assignment, permutations, simple_graphs

from graphlayout import generators as gen
from graphlayout.graph import Graph, apply_ordering
from graphlayout.metrics import (REPORT_COLUMNS, balance, colocation_ratio, edge_cut, gap_costs, gap_sum_ratio,
                                 layout_report, max_part_cut, replication_ratio, write_report)
from graphlayout.partition import Partition, partition_random


def six_cycle_split():
    g = gen.cycle(6)
    return g, Partition.from_assignment(g, np.array([0, 0, 0, 1, 1, 1]), 2)


def test_six_cycle_hand_values():
    g, part = six_cycle_split()
    assert balance(g, part) == (1.0, 4 / 3)
    assert edge_cut(g, part) == (4 / 12, 4)
    assert max_part_cut(g, part) == 2
    assert replication_ratio(g, part, 2) == 2.0
    assert replication_ratio(g, part, 1) == 8 / 6


def test_colocation_star_and_path():
    assert colocation_ratio(gen.star(3)) == 1.0
    assert colocation_ratio(gen.path(5)) == 0.0


def test_gap_cost_star_hub_row():
    costs = gap_costs(gen.star(3))
    assert abs(costs[0] - 3.0) < 1e-12


def test_gap_sum_star_full_formula():
    # every row contributes, including each leaf's single gap back to the hub
    expected = (3 + 1 + math.log2(3) + 2) / (6 * 2)
    assert abs(gap_sum_ratio(gen.star(3)) - expected) < 1e-12


@pytest.mark.xfail(strict=True, reason="0.25 counts only the hub row; leaf rows add log2 gaps to the hub")
def test_gap_sum_star_hub_only_figure():
    assert abs(gap_sum_ratio(gen.star(3)) - 0.25) < 1e-12


def test_gap_sum_degenerate():
    assert gap_sum_ratio(gen.path(1)) == 0.0
    assert gap_sum_ratio(gen.path(2)) == 1.0


def _inner_gap_cost(g):
    return gap_costs(g).sum() - np.log2(1.0 + np.abs(g.adjacency[g.row_offsets[:-1][g.degrees() > 0]]
                                                     - np.flatnonzero(g.degrees() > 0))).sum()


@given(simple_graphs(min_n=2, max_n=8))
def test_reversal_preserves_within_row_gaps(g):
    rev = apply_ordering(g, np.arange(g.n)[::-1].copy())
    assert abs(_inner_gap_cost(rev) - _inner_gap_cost(g)) < 1e-9
    assert colocation_ratio(rev) == colocation_ratio(g)


@pytest.mark.xfail(strict=True, reason="the source-to-first-neighbour term is not reversal symmetric")
def test_gap_sum_reversal_symmetry_literal():
    g = undirected(3, [(0, 1), (0, 2)])
    rev = apply_ordering(g, np.array([2, 1, 0]))
    assert abs(gap_sum_ratio(rev) - gap_sum_ratio(g)) < 1e-12


@given(simple_graphs(min_n=1, max_n=10))
def test_locality_ratios_in_unit_interval(g):
    assert 0.0 <= colocation_ratio(g) <= 1.0
    assert 0.0 <= gap_sum_ratio(g) <= 1.0


def test_replication_p1_is_one():
    g = gen.gnm(30, 60, seed=1)
    part = Partition.from_assignment(g, np.zeros(30, dtype=np.int64), 1)
    for h in (1, 2, 5):
        assert replication_ratio(g, part, h) == 1.0


@given(graph_and_assignment(max_n=10, connected=True))
def test_replication_monotone_and_saturates(data):
    g, asg, p = data
    if g.m == 0:
        return
    part = Partition.from_assignment(g, asg, p)
    vals = [replication_ratio(g, part, h) for h in range(1, g.n + 2)]
    assert all(a <= b for a, b in zip(vals, vals[1:]))
    diam = nx.diameter(nx.from_scipy_sparse_array(g.to_scipy()))
    nonempty = int(np.count_nonzero(part.part_vertices))
    assert replication_ratio(g, part, diam + 1) == nonempty


def test_random_partition_cut_expectation():
    g = gen.gnm(10_000, 50_000, seed=3)
    for p in (2, 4, 8):
        ec, _ = edge_cut(g, partition_random(g, p, 7))
        assert abs(ec - (p - 1) / p) < 0.05


@given(graph_and_assignment())
def test_part_cut_sum_identity(data):
    g, asg, p = data
    part = Partition.from_assignment(g, asg, p)
    _, cut_arcs = edge_cut(g, part)
    assert part.part_cut.sum() == cut_arcs
    assert (edge_cut(g, part)[0] == 0) == (cut_arcs == 0)


@given(graph_and_assignment(), st.data())
def test_metrics_invariant_under_part_relabel(data, draw):
    g, asg, p = data
    relabel = draw.draw(permutations(p))
    a = Partition.from_assignment(g, asg, p)
    b = Partition.from_assignment(g, relabel[asg], p)
    assert balance(g, a) == balance(g, b)
    assert edge_cut(g, a) == edge_cut(g, b)
    assert max_part_cut(g, a) == max_part_cut(g, b)
    assert replication_ratio(g, a, 2) == replication_ratio(g, b, 2)


def exhaustive_check(g, max_p=3, hops=(1, 2)):
    assert colocation_ratio(g) == oracle.colocation(g)
    assert gap_sum_ratio(g) == pytest.approx(oracle.gap_sum(g), abs=1e-12)
    for p in range(1, min(max_p, g.n) + 1):
        for asg in itertools.product(range(p), repeat=g.n):
            asg = list(asg)
            part = Partition.from_assignment(g, np.array(asg), p)
            assert balance(g, part) == oracle.balance(g, asg, p)
            assert edge_cut(g, part) == oracle.edge_cut(g, asg)
            if g.m:
                assert max_part_cut(g, part) == oracle.max_part_cut(g, asg, p)
                for h in hops:
                    assert replication_ratio(g, part, h) == oracle.replication(g, asg, p, h)


def test_exhaustive_small_graphs():
    for h in nx.graph_atlas_g()[1:]:
        if h.number_of_nodes() > 4 or h.number_of_edges() == 0:
            continue
        exhaustive_check(undirected(h.number_of_nodes(), h.edges()))


def test_report_row_and_csv(tmp_path):
    g, part = six_cycle_split()
    rep = layout_report(g, part, graph_name="c6", partitioner="manual", ordering="none", hops=2,
                        baseline=partition_random(g, 2, 0))
    assert rep.ec == 4 / 12 and rep.replication == 2.0 and rep.ec_max_norm == 1.0
    text = write_report([rep], tmp_path / "r.csv")
    assert text.splitlines()[0] == ",".join(REPORT_COLUMNS)
    assert (tmp_path / "r.csv").read_text() == text
