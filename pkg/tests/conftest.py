import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from graphlayout.graph import Graph

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def undirected(n, pairs, weights=None):
    """Graph from an undirected edge list."""
    pairs = list(pairs)
    u = np.array([a for a, _ in pairs], dtype=np.int64)
    v = np.array([b for _, b in pairs], dtype=np.int64)
    w = None if weights is None else np.concatenate([weights, weights]).astype(float)
    return Graph.from_arcs(n, np.concatenate([u, v]), np.concatenate([v, u]), w, directed=False)


def to_nx(g):
    import networkx as nx

    h = nx.DiGraph() if g.directed else nx.Graph()
    h.add_nodes_from(range(g.n))
    w = g.weight_array()
    for a, b, c in zip(g.sources().tolist(), g.adjacency.tolist(), w.tolist()):
        h.add_edge(a, b, weight=c)
    return h


@pytest.fixture
def write(tmp_path):
    def _write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return p
    return _write


def pytest_terminal_summary(terminalreporter):
    try:
        import test_acceptance
    except ImportError:
        return
    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
