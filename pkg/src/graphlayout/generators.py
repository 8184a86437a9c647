"""Deterministic synthetic graphs used as desk-scale test inputs."""

from __future__ import annotations

import random

import numpy as np

from .errors import DomainError
from .graph import Graph
from .rng import substream

KINDS = ("planted", "ba-like", "path", "cycle", "star", "clique-pair", "gnm")


def _undirected(n, u, v) -> Graph:
    u = np.asarray(u, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    return Graph.from_arcs(n, np.concatenate([u, v]), np.concatenate([v, u]), directed=False)


def _relabel(n, u, v, rng, shuffle):
    if not shuffle:
        return u, v
    perm = rng.permutation(n)
    return perm[u], perm[v]


def path(n: int) -> Graph:
    if n < 1:
        raise DomainError("path needs n >= 1")
    a = np.arange(n - 1)
    return _undirected(n, a, a + 1)


def cycle(n: int) -> Graph:
    if n < 3:
        raise DomainError("cycle needs n >= 3")
    a = np.arange(n)
    return _undirected(n, a, (a + 1) % n)


def star(leaves: int) -> Graph:
    """Hub 0 joined to leaves 1..leaves."""
    if leaves < 1:
        raise DomainError("star needs at least one leaf")
    return _undirected(leaves + 1, np.zeros(leaves, dtype=np.int64), np.arange(1, leaves + 1))


def clique(k: int, offset: int = 0):
    i, j = np.triu_indices(k, 1)
    return i + offset, j + offset


def clique_pair(k: int) -> Graph:
    """Two k-cliques on ``0..k-1`` and ``k..2k-1`` joined by the edge ``(k-1, k)``."""
    if k < 2:
        raise DomainError("clique_pair needs k >= 2")
    a1, b1 = clique(k)
    a2, b2 = clique(k, k)
    u = np.concatenate([a1, a2, [k - 1]])
    v = np.concatenate([b1, b2, [k]])
    return _undirected(2 * k, u, v)


def _pairs_from_index(idx: np.ndarray):
    """Decode ``idx = i(i-1)/2 + j`` with ``j < i``."""
    i = np.floor((1 + np.sqrt(1 + 8 * idx.astype(np.float64))) / 2).astype(np.int64)
    i -= (i * (i - 1) // 2 > idx)
    i += ((i + 1) * i // 2 <= idx)
    return i, idx - i * (i - 1) // 2


def gnm(n: int, m: int, seed: int = 0) -> Graph:
    """Uniform random simple graph with ``m`` edges."""
    total = n * (n - 1) // 2
    if m > total:
        raise DomainError(f"gnm: m={m} exceeds {total} possible edges")
    rng = substream(seed, "generate", 0)
    i, j = _pairs_from_index(rng.choice(total, size=m, replace=False))
    return _undirected(n, i, j)


def planted(blocks: int, block_size: int, p_in: float, p_out: float, seed: int = 0,
            shuffle: bool = True) -> Graph:
    """Stochastic block model with equal blocks.

    Intra-block pairs are edges with probability ``p_in``, inter-block pairs
    with ``p_out``.  Vertex ids are shuffled unless ``shuffle`` is false, in
    which case block ``b`` holds ids ``b*block_size .. (b+1)*block_size-1``.
    """
    if blocks < 1 or block_size < 1 or not (0 <= p_out <= 1 and 0 <= p_in <= 1):
        raise DomainError("planted: need blocks, block_size >= 1 and probabilities in [0, 1]")
    rng = substream(seed, "generate", 1)
    n = blocks * block_size
    us, vs = [], []
    per_block = block_size * (block_size - 1) // 2
    for b in range(blocks):
        cnt = rng.binomial(per_block, p_in) if per_block else 0
        i, j = _pairs_from_index(rng.choice(per_block, size=cnt, replace=False))
        us.append(i + b * block_size)
        vs.append(j + b * block_size)
    n_inter = n * (n - 1) // 2 - blocks * per_block
    want = rng.binomial(n_inter, p_out) if n_inter else 0
    seen: set[int] = set()
    iu, iv = [], []
    while len(iu) < want:
        k = 2 * (want - len(iu)) + 16
        a = rng.integers(0, n, k)
        c = rng.integers(0, n, k)
        ok = (a // block_size) != (c // block_size)
        for x, y in zip(np.minimum(a, c)[ok].tolist(), np.maximum(a, c)[ok].tolist()):
            key = x * n + y
            if key not in seen:
                seen.add(key)
                iu.append(x)
                iv.append(y)
                if len(iu) == want:
                    break
    us.append(np.array(iu, dtype=np.int64))
    vs.append(np.array(iv, dtype=np.int64))
    u, v = _relabel(n, np.concatenate(us), np.concatenate(vs), rng, shuffle)
    return _undirected(n, u, v)


def ba_like(n: int, attach: int = 3, seed: int = 0, locality: float = 0.0, window: int = 64,
            shuffle: bool = True) -> Graph:
    """Preferential attachment with an optional copying-style locality bias.

    Each new vertex adds ``attach`` edges.  With probability ``1 - locality``
    a target is drawn proportionally to degree; otherwise a vertex ``w`` is
    drawn from the ``window`` most recent vertices and the target is ``w`` or
    a uniformly chosen neighbour of ``w`` (still degree-biased, but local).
    ``locality > 0`` yields separable, web-crawl-like graphs.
    """
    if attach < 1 or n <= attach:
        raise DomainError("ba_like: need 1 <= attach < n")
    if not 0 <= locality <= 1:
        raise DomainError("ba_like: locality must lie in [0, 1]")
    r = random.Random(int(substream(seed, "generate", 2).integers(2**63)))
    adj: list[list[int]] = [[] for _ in range(n)]
    ends: list[int] = []
    us, vs = [], []

    def add(a, b):
        adj[a].append(b)
        adj[b].append(a)
        ends.extend((a, b))
        us.append(a)
        vs.append(b)

    for a in range(attach + 1):
        for b in range(a):
            add(a, b)
    for v in range(attach + 1, n):
        chosen: set[int] = set()
        while len(chosen) < attach:
            if locality and r.random() < locality:
                w = v - 1 - r.randrange(min(window, v))
                t = w if r.random() < 0.5 or not adj[w] else adj[w][r.randrange(len(adj[w]))]
            else:
                t = ends[r.randrange(len(ends))]
            chosen.add(t)
        for t in sorted(chosen):
            add(v, t)
    rng = substream(seed, "generate", 3)
    u, w = _relabel(n, np.array(us, dtype=np.int64), np.array(vs, dtype=np.int64), rng, shuffle)
    return _undirected(n, u, w)


def with_random_weights(g: Graph, low: int = 1, high: int = 255, seed: int = 0) -> Graph:
    """Integer weights uniform in ``[low, high]``; both arcs of an edge share one weight."""
    rng = substream(seed, "weights", 0)
    src = g.sources()
    if g.directed:
        w = rng.integers(low, high + 1, g.m).astype(np.float64)
        return Graph(g.row_offsets, g.adjacency, w, True)
    lo = np.minimum(src, g.adjacency)
    hi = np.maximum(src, g.adjacency)
    key = lo * g.n + hi
    uniq, inv = np.unique(key, return_inverse=True)
    w = rng.integers(low, high + 1, len(uniq)).astype(np.float64)[inv]
    return Graph(g.row_offsets, g.adjacency, w, False)


def generate(kind: str, seed: int = 0, **params) -> Graph:
    """Dispatch by generator name (see ``KINDS``)."""
    if kind == "planted":
        return planted(params.get("blocks", 10), params.get("block_size", 100), params.get("p_in", 0.1),
                       params.get("p_out", 0.001), seed, params.get("shuffle", True))
    if kind == "ba-like":
        return ba_like(params.get("n", 1000), params.get("attach", 3), seed, params.get("locality", 0.0),
                       params.get("window", 64), params.get("shuffle", True))
    if kind == "path":
        return path(params.get("n", 10))
    if kind == "cycle":
        return cycle(params.get("n", 10))
    if kind == "star":
        return star(params.get("n", 10) - 1)
    if kind == "clique-pair":
        return clique_pair(params.get("k", 5))
    if kind == "gnm":
        return gnm(params.get("n", 100), params.get("m", 300), seed)
    raise DomainError(f"unknown generator {kind!r}; choose from {KINDS}")
