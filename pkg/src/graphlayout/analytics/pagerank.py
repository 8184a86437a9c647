"""Push-style PageRank with one aggregated all-to-all per iteration."""

from __future__ import annotations

import numpy as np

from ..errors import DomainError
from .distributed import BenchTrace, DistributedGraph, group_by_owner, timed


def pagerank(dg: DistributedGraph, iters: int = 20, damping: float = 0.85):
    """Run ``iters`` power iterations; returns ``(ranks, trace)``.

    Each task sums its contributions per target vertex before sending, so a
    task sends one record per remote vertex it references per iteration.
    Dangling mass is spread uniformly over all vertices through a global sum
    that is not charged as record traffic.
    """
    if iters < 1:
        raise DomainError("iters must be >= 1")
    if not 0 <= damping <= 1:
        raise DomainError("damping must lie in [0, 1]")
    n, p = dg.n, dg.p
    trace = BenchTrace("pagerank", p, meta={"iters": iters, "damping": damping})
    if n == 0:
        return np.zeros(0), trace
    with timed(trace):
        ranks = [np.full(t.n_local, 1.0 / n) for t in dg.tasks]
        outdeg = [np.diff(t.offsets) for t in dg.tasks]
        src = [t.local_sources() for t in dg.tasks]
        is_local = [dg.owner[t.adjacency] == t.rank for t in dg.tasks]
        for it in range(iters):
            outboxes, local_acc, dangling, ops = [], [], [], []
            for t, r, deg, s, loc in zip(dg.tasks, ranks, outdeg, src, is_local):
                share = np.divide(r, deg, out=np.zeros_like(r), where=deg > 0)
                vals = share[s]
                acc = np.bincount(dg.local_index[t.adjacency[loc]], vals[loc], minlength=t.n_local).astype(np.float64)
                targets, inv = np.unique(t.adjacency[~loc], return_inverse=True)
                sums = np.bincount(inv, vals[~loc], minlength=len(targets)).astype(np.float64)
                outboxes.append(group_by_owner(dg, t.rank, targets, sums))
                local_acc.append(acc)
                dangling.append(r[deg == 0].sum())
                ops.append(len(t.adjacency))
            lost = float(np.sum(dangling))
            inboxes = trace.exchange(f"iter{it}", ops, outboxes)
            updates = []
            for t, acc, inbox in zip(dg.tasks, local_acc, inboxes):
                got = 0
                for _, (ids, sums) in inbox:
                    acc += np.bincount(dg.local_index[ids], sums, minlength=t.n_local)
                    got += len(ids)
                updates.append(got + t.n_local)
            trace.add_compute(updates)
            ranks = [(1.0 - damping) / n + damping * (acc + lost / n) for acc in local_acc]
    return dg.gather(ranks, 0.0), trace


def pagerank_dense(g, iters: int = 20, damping: float = 0.85) -> np.ndarray:
    """Reference power iteration on a dense transition matrix (small graphs)."""
    n = g.n
    a = np.zeros((n, n))
    np.add.at(a, (g.adjacency, g.sources()), 1.0)
    deg = a.sum(axis=0)
    dangling = deg == 0
    a[:, ~dangling] /= deg[~dangling]
    r = np.full(n, 1.0 / n)
    for _ in range(iters):
        r = (1.0 - damping) / n + damping * (a @ r + r[dangling].sum() / n)
    return r
