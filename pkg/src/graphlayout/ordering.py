"""Vertex relabelling: random shuffle, reverse Cuthill-McKee, and the
BFS-level ordering that hands out ids from the deepest level back to the
root without sorting inside levels.

An ordering is stored as ``perm`` with ``perm[old] = new``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, GraphFormatError
from .graph import Graph, _row_indices, as_permutation, component_labels
from .rng import substream

STRATEGIES = ("random", "rcm", "dgl")
GLOBAL = "global"
PER_PART = "per_part"


@dataclass(eq=False)
class Ordering:
    perm: np.ndarray
    scope: str = GLOBAL
    part_offsets: np.ndarray | None = None

    def __post_init__(self):
        self.perm = np.asarray(self.perm, dtype=np.int64)

    @property
    def n(self) -> int:
        return len(self.perm)

    def inverse(self) -> np.ndarray:
        """``inv[new] = old``."""
        inv = np.empty_like(self.perm)
        inv[self.perm] = np.arange(self.n)
        return inv

    def validate(self) -> None:
        as_permutation(self.perm, self.n)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Ordering):
            return NotImplemented
        return np.array_equal(self.perm, other.perm)

    __hash__ = None


def identity(n: int) -> Ordering:
    return Ordering(np.arange(n))


def order_random(g: Graph, seed: int = 0) -> Ordering:
    return Ordering(substream(seed, "order", 0).permutation(g.n))


def _min_degree_root(deg: np.ndarray, members: np.ndarray, rng) -> int:
    d = deg[members]
    cands = members[d == d.min()]
    return int(cands[rng.integers(len(cands))]) if len(cands) > 1 else int(cands[0])


def _bfs_sequence(g: Graph, root: int, sort_by_degree: bool) -> np.ndarray:
    """BFS level sets from ``root``, each in visitation order.

    The frontier is expanded level by level.  A newly reached vertex keeps
    its first-discovery position, which reproduces FIFO-queue order exactly
    (neighbours are scanned in ascending id).  With ``sort_by_degree`` the
    children of each parent are additionally ordered by ascending degree,
    giving Cuthill-McKee order.
    """
    off, adj = g.row_offsets, g.adjacency
    deg = np.diff(off)
    seen = np.zeros(g.n, dtype=bool)
    seen[root] = True
    first = np.full(g.n, np.iinfo(np.int64).max, dtype=np.int64)
    frontier = np.array([root], dtype=np.int64)
    levels = [frontier]
    while True:
        idx = _row_indices(off, frontier)
        if not len(idx):
            break
        nbrs = adj[idx]
        fresh = ~seen[nbrs]
        nbrs = nbrs[fresh]
        if not len(nbrs):
            break
        pos = np.arange(len(nbrs), dtype=np.int64)
        np.minimum.at(first, nbrs, pos)
        keep = first[nbrs] == pos
        nxt = nbrs[keep]
        first[nxt] = np.iinfo(np.int64).max
        seen[nxt] = True
        if sort_by_degree:
            parent = np.repeat(np.arange(len(frontier)), deg[frontier])[fresh][keep]
            nxt = nxt[np.lexsort((nxt, deg[nxt], parent))]
        levels.append(nxt)
        frontier = nxt
    return levels


def _component_order(g: Graph) -> list[np.ndarray]:
    """Components as vertex arrays, largest first (ties: smallest min id)."""
    # Connected graphs are the common case; one BFS confirms it more cheaply
    # than a full component labelling.
    probe = _bfs_sequence(g, int(np.argmax(g.degrees())), sort_by_degree=False)
    if sum(len(lv) for lv in probe) == g.n:
        return [np.arange(g.n, dtype=np.int64)]
    labels = component_labels(g)
    order = np.argsort(labels, kind="stable")
    bounds = np.flatnonzero(np.diff(labels[order])) + 1
    comps = np.split(order, bounds)
    comps.sort(key=lambda c: (-len(c), int(c[0])))
    return comps


def _level_order(g: Graph, seed: int, root: int | None, rcm: bool, stream: str) -> Ordering:
    if g.directed:
        raise DomainError("BFS orderings need an undirected graph; symmetrize first")
    rng = substream(seed, stream, 0)
    deg = g.degrees()
    perm = np.empty(g.n, dtype=np.int64)
    nxt = 0
    comps = _component_order(g) if g.n else []
    for ci, members in enumerate(comps):
        if ci == 0 and root is not None:
            if root not in set(members.tolist()):
                raise DomainError("root must lie in the largest component")
            r = int(root)
        else:
            r = _min_degree_root(deg, members, rng)
        levels = _bfs_sequence(g, r, sort_by_degree=rcm)
        if rcm:
            seq = np.concatenate(levels)[::-1]
        else:
            seq = np.concatenate(levels[::-1])
        perm[seq] = np.arange(nxt, nxt + len(seq))
        nxt += len(seq)
    return Ordering(perm)


def order_dgl(g: Graph, seed: int = 0, root: int | None = None) -> Ordering:
    """BFS-level ordering: ids are handed out from the deepest BFS level back
    to the root level, keeping queue order inside each level.

    The root is a minimum-degree vertex (seeded tie-break) unless ``root``
    pins it for the largest component.  Components are labelled one after
    another, largest first.
    """
    return _level_order(g, seed, root, rcm=False, stream="order-dgl")


def order_rcm(g: Graph, seed: int = 0, root: int | None = None) -> Ordering:
    """Reverse Cuthill-McKee from a minimum-degree root, per component."""
    return _level_order(g, seed, root, rcm=True, stream="order-rcm")


def order_global(g: Graph, strategy: str, seed: int = 0, root: int | None = None) -> Ordering:
    if strategy == "random":
        return order_random(g, seed)
    if strategy == "dgl":
        return order_dgl(g, seed, root)
    if strategy == "rcm":
        return order_rcm(g, seed, root)
    raise DomainError(f"unknown ordering strategy {strategy!r}; choose from {STRATEGIES}")


def order_per_part(g: Graph, part, strategy: str, seed: int = 0) -> Ordering:
    """Apply ``strategy`` to each part-induced subgraph; part ``k`` receives the
    contiguous id range after parts ``0..k-1``."""
    if strategy not in STRATEGIES:
        raise DomainError(f"unknown ordering strategy {strategy!r}; choose from {STRATEGIES}")
    asg = np.asarray(part.assignment, dtype=np.int64)
    if len(asg) != g.n:
        raise DomainError("partition does not match graph")
    p = part.p
    sizes = np.bincount(asg, minlength=p)
    offsets = np.concatenate(([0], np.cumsum(sizes)))
    perm = np.empty(g.n, dtype=np.int64)
    for k, members in enumerate(part.parts() if hasattr(part, "parts") else _members(asg, p)):
        if not len(members):
            continue
        sub = g.induced_subgraph(members)
        local = order_global(sub, strategy, int(substream(seed, "order-part", k).integers(2**63)))
        perm[members] = offsets[k] + local.perm
    return Ordering(perm, PER_PART, offsets)


def _members(asg, p):
    order = np.argsort(asg, kind="stable")
    bounds = np.searchsorted(asg[order], np.arange(p + 1))
    return [order[bounds[k]:bounds[k + 1]] for k in range(p)]


def bfs_levels_of(g: Graph, root: int) -> np.ndarray:
    """Level of each vertex reached from ``root`` (-1 elsewhere)."""
    lv = np.full(g.n, -1, dtype=np.int64)
    for d, layer in enumerate(_bfs_sequence(g, root, False)):
        lv[layer] = d
    return lv


def save_ordering(ordering: Ordering, path) -> None:
    with open(path, "w") as fh:
        fh.writelines(f"{k}\n" for k in ordering.perm.tolist())


def load_ordering(path, n: int | None = None) -> Ordering:
    ids = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if not s:
                continue
            try:
                ids.append(int(s))
            except ValueError:
                raise GraphFormatError(f"ordering entry {s!r} is not an integer", lineno) from None
    perm = np.array(ids, dtype=np.int64)
    if n is not None and len(perm) != n:
        raise GraphFormatError(f"ordering has {len(perm)} entries, graph has {n} vertices")
    try:
        as_permutation(perm, len(perm))
    except DomainError as exc:
        raise GraphFormatError(str(exc)) from None
    return Ordering(perm)
