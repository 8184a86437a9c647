"""Color-coding estimates of tree-template embedding counts.

The dynamic-programming table has one row per vertex and one column per
colour set of the sub-template's size.  Rows live with the task owning
the vertex; each combination step ships the passive child's rows for
ghost vertices to the tasks that reference them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.sparse import csr_matrix

from ..errors import DomainError, GraphFormatError
from ..rng import keyed_colors
from .distributed import BenchTrace, DistributedGraph, timed

MAX_K = 12


@dataclass(frozen=True)
class SubTemplate:
    root: int
    vertices: frozenset

    @property
    def size(self) -> int:
        return len(self.vertices)


@dataclass
class TemplateTree:
    """A tree on vertices ``0..k-1`` rooted at 0."""

    k: int
    edges: list[tuple[int, int]]
    children: list[list[int]] = field(init=False, repr=False)

    def __post_init__(self):
        k = self.k
        if k < 1:
            raise DomainError("template needs at least one vertex")
        if len(self.edges) != k - 1:
            raise DomainError(f"a tree on {k} vertices has {k - 1} edges, got {len(self.edges)}")
        adj = [[] for _ in range(k)]
        for a, b in self.edges:
            if not (0 <= a < k and 0 <= b < k) or a == b:
                raise DomainError(f"bad template edge ({a}, {b})")
            adj[a].append(b)
            adj[b].append(a)
        parent = [-1] * k
        seen = [False] * k
        seen[0] = True
        stack = [0]
        self.children = [[] for _ in range(k)]
        while stack:
            v = stack.pop()
            for u in sorted(adj[v]):
                if not seen[u]:
                    seen[u] = True
                    parent[u] = v
                    self.children[v].append(u)
                    stack.append(u)
        if not all(seen):
            raise DomainError("template is not connected")
        self._adj = adj

    @classmethod
    def from_edges(cls, edges) -> "TemplateTree":
        """Build from an edge list over arbitrary labels (relabelled by first appearance)."""
        ids: dict = {}
        pairs = []
        for a, b in edges:
            for x in (a, b):
                ids.setdefault(x, len(ids))
            pairs.append((ids[a], ids[b]))
        return cls(max(len(ids), 1), pairs)

    @classmethod
    def load(cls, path) -> "TemplateTree":
        edges = []
        with open(path) as fh:
            for lineno, line in enumerate(fh, 1):
                s = line.strip()
                if not s or s[0] in "#%":
                    continue
                parts = s.split()
                if len(parts) < 2:
                    raise GraphFormatError("template line needs two vertex ids", lineno)
                try:
                    edges.append((int(parts[0]), int(parts[1])))
                except ValueError:
                    raise GraphFormatError(f"non-integer vertex id in {s!r}", lineno) from None
        if not edges:
            raise GraphFormatError("template file has no edges")
        return cls.from_edges(edges)

    def subtree(self, v: int) -> frozenset:
        out, stack = [], [v]
        while stack:
            x = stack.pop()
            out.append(x)
            stack.extend(self.children[x])
        return frozenset(out)

    def decomposition(self) -> list[tuple[SubTemplate, SubTemplate, SubTemplate]]:
        """Post-order list of ``(whole, active, passive)`` splits.

        Each split cuts the edge from the sub-template root to its last
        remaining child: the passive part is that child's subtree, the active
        part keeps the root.
        """
        steps = []

        def split(st: SubTemplate):
            if st.size == 1:
                return
            kids = [c for c in self.children[st.root] if c in st.vertices]
            c = kids[-1]
            passive = SubTemplate(c, self.subtree(c))
            active = SubTemplate(st.root, st.vertices - passive.vertices)
            split(active)
            split(passive)
            steps.append((st, active, passive))

        split(SubTemplate(0, frozenset(range(self.k))))
        return steps

    def _canon(self, v: int, parent: int) -> str:
        return "(" + "".join(sorted(self._canon(u, v) for u in self._adj[v] if u != parent)) + ")"

    def _rooted_aut(self, v: int, parent: int) -> int:
        kids = [u for u in self._adj[v] if u != parent]
        total = 1
        groups: dict[str, int] = {}
        for u in kids:
            total *= self._rooted_aut(u, v)
            key = self._canon(u, v)
            groups[key] = groups.get(key, 0) + 1
        for cnt in groups.values():
            total *= math.factorial(cnt)
        return total

    def automorphisms(self) -> int:
        """Size of the automorphism group, via the tree centre(s)."""
        if self.k == 1:
            return 1
        deg = [len(a) for a in self._adj]
        layer = [v for v in range(self.k) if deg[v] <= 1]
        left = self.k
        while left > 2:
            left -= len(layer)
            nxt = []
            for v in layer:
                for u in self._adj[v]:
                    deg[u] -= 1
                    if deg[u] == 1:
                        nxt.append(u)
            layer = nxt
        if len(layer) == 1:
            return self._rooted_aut(layer[0], -1)
        a, b = layer
        aut = self._rooted_aut(a, b) * self._rooted_aut(b, a)
        return aut * (2 if self._canon(a, b) == self._canon(b, a) else 1)


def path_template(k: int) -> TemplateTree:
    return TemplateTree(k, [(i, i + 1) for i in range(k - 1)])


def star_template(k: int) -> TemplateTree:
    return TemplateTree(k, [(0, i) for i in range(1, k)])


class _ColorSets:
    """Column layout of colour-set tables: masks of each popcount in ascending order."""

    def __init__(self, k: int, colored: bool):
        self.k = k
        self.colored = colored
        if colored:
            self.masks = {s: sorted(sum(1 << c for c in comb) for comb in combinations(range(k), s))
                          for s in range(1, k + 1)}
        else:
            self.masks = {s: [0] for s in range(1, k + 1)}
        self.index = {s: {mk: i for i, mk in enumerate(ms)} for s, ms in self.masks.items()}
        self._pairs: dict = {}

    def width(self, s: int) -> int:
        return len(self.masks[s])

    def pairs(self, a: int, b: int):
        """``(active cols, passive cols, combiner)`` with ``combiner`` summing
        pair products into the columns of size ``a + b``."""
        key = (a, b)
        if key not in self._pairs:
            i1, i2, io = [], [], []
            out_index = self.index[a + b]
            for x, m1 in enumerate(self.masks[a]):
                for y, m2 in enumerate(self.masks[b]):
                    if self.colored and m1 & m2:
                        continue
                    i1.append(x)
                    i2.append(y)
                    io.append(out_index[m1 | m2])
            comb = csr_matrix((np.ones(len(io)), (np.arange(len(io)), io)),
                              shape=(len(io), self.width(a + b)))
            self._pairs[key] = (np.array(i1), np.array(i2), comb)
        return self._pairs[key]


def _task_adjacency(dg: DistributedGraph):
    """Per task: sparse matrix from owned rows to [owned | ghost] rows, loops dropped."""
    mats = []
    for t in dg.tasks:
        src = t.local_sources()
        tgt = t.adjacency
        keep = tgt != t.owned[src]
        src, tgt = src[keep], tgt[keep]
        loc = dg.owner[tgt] == t.rank
        col = np.where(loc, dg.local_index[tgt], t.n_local + np.searchsorted(t.ghosts, tgt))
        mats.append(csr_matrix((np.ones(len(col)), (src, col)),
                               shape=(t.n_local, t.n_local + len(t.ghosts))))
    return mats


def _send_lists(dg: DistributedGraph):
    """``send[i][j]``: local indices (on i) of i's vertices that are ghosts on j."""
    send = [dict() for _ in range(dg.p)]
    for t in dg.tasks:
        for i in np.unique(t.ghost_owner).tolist():
            send[i][t.rank] = t.ghost_index[t.ghost_owner == i]
    return send


def count_subgraphs(dg: DistributedGraph, template: TemplateTree, iterations: int = 100, seed: int = 0,
                    chunk: int = 4096):
    """Estimate non-induced embeddings of ``template``; returns ``(estimate, trace)``.

    Templates with k <= 2 need no colouring and are counted exactly.
    Colours come from the distributed graph's vertex keys, so a fixed seed
    gives the same estimate under every partition and relabelling.
    """
    if iterations < 1:
        raise DomainError("iterations must be >= 1")
    if dg.directed:
        raise DomainError("subgraph counting needs an undirected graph")
    k = template.k
    if k > MAX_K:
        raise DomainError(f"template size {k} exceeds {MAX_K}")
    trace = BenchTrace("count", dg.p, meta={"k": k, "iterations": iterations, "seed": seed})
    if k > dg.n:
        trace.meta["estimates"] = [0.0] * iterations
        return 0.0, trace
    colored = k > 2
    sets = _ColorSets(k, colored)
    steps = template.decomposition()
    aut = template.automorphisms()
    scale = (k ** k / math.factorial(k) if colored else 1.0) / aut
    mats = _task_adjacency(dg)
    send = _send_lists(dg)
    ghost_pos = []
    for t in dg.tasks:
        pos = {}
        for i in np.unique(t.ghost_owner).tolist():
            pos[i] = np.flatnonzero(t.ghost_owner == i)
        ghost_pos.append(pos)
    estimates = []
    rounds = iterations if colored else 1
    with timed(trace):
        for it in range(rounds):
            tables = {}
            leaf = []
            for t in dg.tasks:
                tab = np.zeros((t.n_local, sets.width(1)))
                if colored:
                    col = keyed_colors(dg.keys[t.owned], k, seed, it)
                    tab[np.arange(t.n_local), col] = 1.0
                else:
                    tab[:, 0] = 1.0
                leaf.append(tab)
            for s, (whole, active, passive) in enumerate(steps):
                act = leaf if active.size == 1 else tables[active]
                pas = leaf if passive.size == 1 else tables[passive]
                width_p = sets.width(passive.size)
                outboxes = [{j: (t.owned[rows], pas[t.rank][rows]) for j, rows in send[t.rank].items()}
                            for t in dg.tasks]
                i1, i2, comb = sets.pairs(active.size, passive.size)
                ops = [t.n_local * len(i1) + mats[t.rank].nnz * width_p for t in dg.tasks]
                inboxes = trace.exchange(f"iter{it}-step{s}", ops, outboxes)
                for r in trace.phases[-1].sent, trace.phases[-1].received:
                    r *= width_p
                out = []
                for t in dg.tasks:
                    ext = np.zeros((t.n_local + len(t.ghosts), width_p))
                    ext[:t.n_local] = pas[t.rank]
                    for i, (_, rows) in inboxes[t.rank]:
                        ext[t.n_local + ghost_pos[t.rank][i]] = rows
                    nbr = mats[t.rank] @ ext
                    res = np.zeros((t.n_local, sets.width(whole.size)))
                    for lo in range(0, len(i1), chunk):
                        sl = slice(lo, lo + chunk)
                        res += (act[t.rank][:, i1[sl]] * nbr[:, i2[sl]]) @ comb[sl]
                    out.append(res)
                tables[whole] = out
            final = leaf if k == 1 else tables[steps[-1][0]]
            total = math.fsum(float(tab[:, -1].sum()) for tab in final)
            estimates.append(total * scale)
    if not colored:
        estimates = estimates * iterations
    trace.meta["estimates"] = estimates
    return float(np.mean(estimates)), trace
