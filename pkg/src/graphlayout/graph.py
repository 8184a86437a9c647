"""Immutable CSR graph and the structural transforms applied before layout.

Undirected graphs store every edge as two arcs (a self-loop as a single
arc ``(u, u)``), so ``m`` is always the arc count and ``num_edges`` the
undirected edge count.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components as _cc

from .errors import DomainError

UNREACHED = -1


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Graph:
    row_offsets: np.ndarray
    adjacency: np.ndarray
    weights: np.ndarray | None = None
    directed: bool = False

    def __post_init__(self):
        object.__setattr__(self, "row_offsets", _frozen(np.asarray(self.row_offsets, dtype=np.int64)))
        object.__setattr__(self, "adjacency", _frozen(np.asarray(self.adjacency, dtype=np.int64)))
        if self.weights is not None:
            object.__setattr__(self, "weights", _frozen(np.asarray(self.weights, dtype=np.float64)))

    @classmethod
    def from_arcs(cls, n, src, dst, weights=None, directed=False) -> "Graph":
        """Build a graph from parallel arc arrays; rows are sorted by target."""
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        if src.shape != dst.shape:
            raise ValueError("src and dst must have equal length")
        if len(src) and (min(src.min(), dst.min()) < 0 or max(src.max(), dst.max()) >= n):
            raise DomainError("arc endpoint outside [0, n)")
        if weights is not None:
            weights = np.asarray(weights, dtype=np.float64)
            order = np.lexsort((weights, dst, src))
            weights = weights[order]
        else:
            order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        offsets = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=offsets[1:])
        return cls(offsets, dst, weights, bool(directed))

    @property
    def n(self) -> int:
        return len(self.row_offsets) - 1

    @property
    def m(self) -> int:
        return len(self.adjacency)

    @property
    def num_edges(self) -> int:
        """Edge count: arcs for directed graphs, unordered pairs otherwise."""
        if self.directed:
            return self.m
        src = self.sources()
        return int(np.count_nonzero(src <= self.adjacency))

    def degrees(self) -> np.ndarray:
        return np.diff(self.row_offsets)

    def neighbors(self, v: int) -> np.ndarray:
        return self.adjacency[self.row_offsets[v]:self.row_offsets[v + 1]]

    def arc_weights(self, v: int) -> np.ndarray:
        lo, hi = self.row_offsets[v], self.row_offsets[v + 1]
        if self.weights is None:
            return np.ones(hi - lo)
        return self.weights[lo:hi]

    def sources(self) -> np.ndarray:
        return np.repeat(np.arange(self.n, dtype=np.int64), self.degrees())

    def weight_array(self) -> np.ndarray:
        return np.ones(self.m) if self.weights is None else self.weights

    def edge_pairs(self) -> tuple[np.ndarray, np.ndarray]:
        """Each edge once: all arcs if directed, else arcs with ``u <= v``."""
        src = self.sources()
        if self.directed:
            return src, self.adjacency
        keep = src <= self.adjacency
        return src[keep], self.adjacency[keep]

    def is_symmetric(self) -> bool:
        src = self.sources()
        w = self.weight_array()
        fwd = np.lexsort((w, self.adjacency, src))
        rev = np.lexsort((w, src, self.adjacency))
        return (np.array_equal(src[fwd], self.adjacency[rev])
                and np.array_equal(self.adjacency[fwd], src[rev])
                and np.array_equal(w[fwd], w[rev]))

    def validate(self) -> None:
        off = self.row_offsets
        if off[0] != 0 or off[-1] != self.m or np.any(np.diff(off) < 0):
            raise DomainError("row_offsets must be nondecreasing from 0 to m")
        if self.m and (self.adjacency.min() < 0 or self.adjacency.max() >= self.n):
            raise DomainError("adjacency entry outside [0, n)")
        if self.weights is not None:
            if len(self.weights) != self.m:
                raise DomainError("weights length must equal m")
            if np.any(self.weights < 0):
                raise DomainError("negative edge weight")
        if not self.directed and not self.is_symmetric():
            raise DomainError("undirected graph is not symmetric")

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        if self.directed != other.directed or (self.weights is None) != (other.weights is None):
            return False
        same = (np.array_equal(self.row_offsets, other.row_offsets)
                and np.array_equal(self.adjacency, other.adjacency))
        if same and self.weights is not None:
            same = np.array_equal(self.weights, other.weights)
        return same

    __hash__ = None

    def __repr__(self) -> str:
        kind = "directed" if self.directed else "undirected"
        w = ", weighted" if self.weights is not None else ""
        return f"Graph(n={self.n}, m={self.m}, {kind}{w})"

    def to_scipy(self) -> csr_matrix:
        return csr_matrix((self.weight_array(), self.adjacency, self.row_offsets), shape=(self.n, self.n))

    def induced_subgraph(self, vertices) -> "Graph":
        """Subgraph on ``vertices`` (sorted ascending, relabelled 0..k-1)."""
        vertices = np.unique(np.asarray(vertices, dtype=np.int64))
        local = np.full(self.n, -1, dtype=np.int64)
        local[vertices] = np.arange(len(vertices))
        src = self.sources()
        keep = (local[src] >= 0) & (local[self.adjacency] >= 0)
        w = None if self.weights is None else self.weights[keep]
        return Graph.from_arcs(len(vertices), local[src[keep]], local[self.adjacency[keep]], w, self.directed)


@dataclass(frozen=True)
class DegreeStats:
    """``d_avg`` is arcs per vertex, which for undirected graphs is the mean degree."""

    d_avg: Fraction
    d_max: int
    approx_diameter: int | None = None


def degree_stats(g: Graph, diameter: bool = False, seed: int = 0) -> DegreeStats:
    deg = g.degrees()
    d_avg = Fraction(g.m, g.n) if g.n else Fraction(0)
    d_max = int(deg.max()) if g.n else 0
    return DegreeStats(d_avg, d_max, approx_diameter(g, seed) if diameter else None)


def bfs_levels(g: Graph, sources, max_depth: int | None = None) -> np.ndarray:
    """Multi-source BFS over out-arcs; unreached vertices get ``UNREACHED``."""
    level = np.full(g.n, UNREACHED, dtype=np.int64)
    frontier = np.unique(np.asarray(sources, dtype=np.int64))
    level[frontier] = 0
    off, adj = g.row_offsets, g.adjacency
    depth = 0
    while len(frontier) and (max_depth is None or depth < max_depth):
        nbrs = adj[_row_indices(off, frontier)]
        nbrs = np.unique(nbrs[level[nbrs] == UNREACHED])
        depth += 1
        level[nbrs] = depth
        frontier = nbrs
    return level


def _row_indices(off: np.ndarray, rows: np.ndarray) -> np.ndarray:
    """Concatenated arc indices of ``rows`` in the given row order."""
    starts = off[rows]
    counts = off[rows + 1] - starts
    total = int(counts.sum())
    if total == 0:
        return np.zeros(0, dtype=np.int64)
    shift = np.repeat(starts - np.concatenate(([0], np.cumsum(counts)[:-1])), counts)
    return np.arange(total, dtype=np.int64) + shift


def approx_diameter(g: Graph, seed: int = 0) -> int:
    """Double-sweep BFS lower bound on the diameter of the largest component."""
    if g.n == 0:
        return 0
    und = symmetrize(g) if g.directed else g
    labels = component_labels(und)
    sizes = np.bincount(labels)
    start = int(np.flatnonzero(labels == np.argmax(sizes))[0])
    lv = bfs_levels(und, [start])
    far = int(np.argmax(lv))
    return int(bfs_levels(und, [far]).max())


def component_labels(g: Graph) -> np.ndarray:
    """Weakly connected component label per vertex."""
    _, labels = _cc(g.to_scipy(), directed=True, connection="weak")
    return labels.astype(np.int64)


def symmetrize(g: Graph) -> Graph:
    """Union of arcs and their reverses as an undirected graph.

    Parallel arcs collapse to one; when both directions carry weights the
    smaller one is kept for both.
    """
    src = g.sources()
    s = np.concatenate([src, g.adjacency])
    d = np.concatenate([g.adjacency, src])
    w = None if g.weights is None else np.concatenate([g.weights, g.weights])
    s, d, w = _dedupe(g.n, s, d, w)
    return Graph.from_arcs(g.n, s, d, w, directed=False)


def _dedupe(n, src, dst, w):
    """Drop repeated ``(src, dst)`` arcs, keeping the minimum weight."""
    if w is None:
        order = np.lexsort((dst, src))
    else:
        order = np.lexsort((w, dst, src))
    src, dst = src[order], dst[order]
    first = np.ones(len(src), dtype=bool)
    first[1:] = (src[1:] != src[:-1]) | (dst[1:] != dst[:-1])
    return src[first], dst[first], (None if w is None else w[order][first])


def preprocess(g: Graph) -> tuple[Graph, np.ndarray]:
    """Drop self-loops, parallel arcs and degree-0 vertices, keep the largest
    weakly connected component.

    Returns the cleaned graph and ``id_map`` with the new id of every old
    vertex, or -1 for dropped vertices.  New ids preserve old relative order.
    Ties between equally large components go to the one with the smallest
    minimum vertex id.
    """
    src = g.sources()
    keep = src != g.adjacency
    w = None if g.weights is None else g.weights[keep]
    s, d, w = _dedupe(g.n, src[keep], g.adjacency[keep], w)
    touched = np.zeros(g.n, dtype=bool)
    touched[s] = True
    touched[d] = True
    if not touched.any():
        raise DomainError("preprocessing removed every vertex")
    clean = Graph.from_arcs(g.n, s, d, w, g.directed)
    labels = component_labels(clean)
    labels[~touched] = -1
    valid = labels >= 0
    sizes = np.bincount(labels[valid])
    min_id = np.full(len(sizes), g.n, dtype=np.int64)
    np.minimum.at(min_id, labels[valid], np.flatnonzero(valid))
    best = min(range(len(sizes)), key=lambda c: (-sizes[c], min_id[c]))
    chosen = labels == best
    id_map = np.full(g.n, -1, dtype=np.int64)
    id_map[chosen] = np.arange(int(chosen.sum()))
    arc_keep = chosen[s]
    w = None if w is None else w[arc_keep]
    out = Graph.from_arcs(int(chosen.sum()), id_map[s[arc_keep]], id_map[d[arc_keep]], w, g.directed)
    return out, id_map


def as_permutation(ordering, n: int) -> np.ndarray:
    perm = np.asarray(getattr(ordering, "perm", ordering), dtype=np.int64)
    if perm.shape != (n,) or not np.array_equal(np.sort(perm), np.arange(n)):
        raise DomainError("ordering is not a bijection on [0, n)")
    return perm


def apply_ordering(g: Graph, ordering) -> Graph:
    """Relabel vertex ``v`` as ``perm[v]``; rows are re-sorted ascending."""
    perm = as_permutation(ordering, g.n)
    return Graph.from_arcs(g.n, perm[g.sources()], perm[g.adjacency], g.weights, g.directed)
