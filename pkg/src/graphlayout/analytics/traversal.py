"""Level-synchronous BFS and delta-stepping SSSP over simulated tasks.

Both follow the same phase shape: local discovery over frontier out-arcs,
an all-to-all carrying remote discoveries to their owners, and a local
update at the owners.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import DomainError
from .distributed import BenchTrace, DistributedGraph, group_by_owner, timed

UNREACHED = -1


def _check_root(dg: DistributedGraph, root: int) -> None:
    if not 0 <= int(root) < dg.n:
        raise DomainError(f"root {root} outside [0, {dg.n})")


def _arc_slices(t, frontier: np.ndarray) -> np.ndarray:
    """Indices into ``t.adjacency`` of the out-arcs of local vertices ``frontier``."""
    if not len(frontier):
        return np.zeros(0, dtype=np.int64)
    starts = t.offsets[frontier]
    lens = t.offsets[frontier + 1] - starts
    total = int(lens.sum())
    if total == 0:
        return np.zeros(0, dtype=np.int64)
    shift = np.repeat(starts - np.concatenate(([0], np.cumsum(lens)[:-1])), lens)
    return np.arange(total, dtype=np.int64) + shift


def bfs(dg: DistributedGraph, root: int):
    """Hop levels from ``root`` (``UNREACHED`` for vertices it cannot reach).

    A task sends each remote vertex at most once over the whole run: once
    a vertex has been announced to its owner it is settled at that level or
    earlier, so later announcements cannot change anything.
    """
    _check_root(dg, root)
    trace = BenchTrace("bfs", dg.p, meta={"root": int(root)})
    with timed(trace):
        levels = [np.full(t.n_local, UNREACHED, dtype=np.int64) for t in dg.tasks]
        announced = [np.zeros(len(t.ghosts), dtype=bool) for t in dg.tasks]
        frontiers = [np.zeros(0, dtype=np.int64) for _ in dg.tasks]
        r_task = int(dg.owner[root])
        r_local = int(dg.local_index[root])
        levels[r_task][r_local] = 0
        frontiers[r_task] = np.array([r_local], dtype=np.int64)
        settled = [1]
        depth = 0
        while any(len(f) for f in frontiers):
            outboxes, found, ops = [], [], []
            for t, f, ann in zip(dg.tasks, frontiers, announced):
                nbrs = t.adjacency[_arc_slices(t, f)]
                loc = dg.owner[nbrs] == t.rank
                found.append(dg.local_index[nbrs[loc]])
                remote = np.unique(nbrs[~loc])
                gi = np.searchsorted(t.ghosts, remote)
                fresh = ~ann[gi]
                ann[gi[fresh]] = True
                outboxes.append(group_by_owner(dg, t.rank, remote[fresh]))
                ops.append(len(nbrs))
            inboxes = trace.exchange(f"level{depth}", ops, outboxes)
            new_total = 0
            updates = []
            for k, (t, lv) in enumerate(zip(dg.tasks, levels)):
                cand = [found[k]] + [dg.local_index[ids] for _, (ids,) in inboxes[k]]
                cand = np.concatenate(cand) if cand else np.zeros(0, dtype=np.int64)
                cand = np.unique(cand)
                fresh = cand[lv[cand] == UNREACHED]
                lv[fresh] = depth + 1
                frontiers[k] = fresh
                new_total += len(fresh)
                updates.append(len(cand))
            trace.add_compute(updates)
            settled.append(new_total)
            depth += 1
        trace.meta["settled_per_phase"] = settled
    return dg.gather(levels, UNREACHED), trace


def default_delta(dg: DistributedGraph) -> float:
    """Average arc weight times ``n / m``."""
    m = sum(len(t.adjacency) for t in dg.tasks)
    if m == 0:
        return 1.0
    total = sum(float(t.weights.sum()) if t.weights is not None else float(len(t.adjacency))
                for t in dg.tasks)
    return (total / m) * (dg.n / m)


class _TaskQueue:
    """Per-task bucket queue.  Entries are appended lazily; an entry is live
    only while the vertex's current distance still maps to that bucket."""

    def __init__(self):
        self.buckets: dict[int, list[np.ndarray]] = {}

    def push(self, b: np.ndarray, verts: np.ndarray) -> None:
        for key in np.unique(b).tolist():
            self.buckets.setdefault(key, []).append(verts[b == key])

    def min_live(self, bucket_of, dist) -> int | None:
        for key in sorted(self.buckets):
            if len(self.take(key, bucket_of, dist, peek=True)):
                return key
            del self.buckets[key]
        return None

    def take(self, key, bucket_of, dist, peek=False) -> np.ndarray:
        chunks = self.buckets.get(key)
        if not chunks:
            return np.zeros(0, dtype=np.int64)
        verts = np.unique(np.concatenate(chunks))
        verts = verts[bucket_of(dist[verts]) == key]
        if peek:
            self.buckets[key] = [verts]
        else:
            del self.buckets[key]
        return verts


def _semisort(t, delta):
    """Reorder each row light-first (``w <= delta``); returns
    ``(adjacency, weights, light_end)`` with ``light_end`` absolute per row."""
    w = t.weights if t.weights is not None else np.ones(len(t.adjacency))
    src = t.local_sources()
    heavy = w > delta
    order = np.lexsort((heavy, src))
    light_count = np.bincount(src[~heavy], minlength=t.n_local)
    return t.adjacency[order], w[order], t.offsets[:-1] + light_count


def sssp_delta(dg: DistributedGraph, root: int, delta: float | None = None, filter_remote: bool = True):
    """Delta-stepping shortest paths; returns ``(dist, trace)`` with ``inf``
    for unreachable vertices.

    Rows are semi-sorted so light arcs (weight <= delta) come first.  Each
    task keeps the best distance it has already proposed for every remote
    neighbour; with ``filter_remote`` a proposal is only sent when it beats
    that cached value.  ``delta=inf`` collapses everything into one bucket.
    """
    _check_root(dg, root)
    for t in dg.tasks:
        if t.weights is not None and len(t.weights) and t.weights.min() < 0:
            raise DomainError("delta-stepping needs nonnegative weights")
    delta = default_delta(dg) if delta is None else float(delta)
    if not delta > 0:
        raise DomainError("delta must be positive")
    trace = BenchTrace("sssp", dg.p, meta={"root": int(root), "delta": delta, "filter": filter_remote})

    if math.isinf(delta):
        def bucket_of(d):
            return np.where(np.isinf(d), -1, 0)
    else:
        def bucket_of(d):
            out = np.full(len(d), -1, dtype=np.int64)
            ok = np.isfinite(d)
            out[ok] = np.floor(d[ok] / delta).astype(np.int64)
            return out

    with timed(trace):
        rows = [_semisort(t, delta) for t in dg.tasks]
        dist = [np.full(t.n_local, np.inf) for t in dg.tasks]
        cache = [np.full(len(t.ghosts), np.inf) for t in dg.tasks]
        queues = [_TaskQueue() for _ in dg.tasks]
        r_task, r_local = int(dg.owner[root]), int(dg.local_index[root])
        dist[r_task][r_local] = 0.0
        queues[r_task].push(np.array([0]), np.array([r_local]))
        buckets_done = []

        def relax(name, picks):
            """picks[k] = (local vertex per arc, arc indices) to relax from task k."""
            outboxes, local_req, ops = [], [], []
            for k, t in enumerate(dg.tasks):
                adj, w, _ = rows[k]
                verts, arcs = picks[k]
                tgt = adj[arcs]
                prop = dist[k][verts] + w[arcs]
                loc = dg.owner[tgt] == t.rank
                local_req.append((dg.local_index[tgt[loc]], prop[loc]))
                rt, rp = tgt[~loc], prop[~loc]
                if len(rt):
                    order = np.lexsort((rp, rt))
                    rt, rp = rt[order], rp[order]
                    first = np.concatenate(([True], rt[1:] != rt[:-1]))
                    rt, rp = rt[first], rp[first]
                    gi = np.searchsorted(t.ghosts, rt)
                    if filter_remote:
                        keep = rp < cache[k][gi]
                        rt, rp, gi = rt[keep], rp[keep], gi[keep]
                    cache[k][gi] = np.minimum(cache[k][gi], rp)
                outboxes.append(group_by_owner(dg, t.rank, rt, rp))
                ops.append(len(arcs))
            inboxes = trace.exchange(name, ops, outboxes)
            updates = []
            for k in range(dg.p):
                ids = [local_req[k][0]] + [dg.local_index[i] for _, (i, _) in inboxes[k]]
                props = [local_req[k][1]] + [d for _, (_, d) in inboxes[k]]
                ids, props = np.concatenate(ids), np.concatenate(props)
                updates.append(len(ids))
                if not len(ids):
                    continue
                best = np.full(dg.tasks[k].n_local, np.inf)
                np.minimum.at(best, ids, props)
                better = np.flatnonzero(best < dist[k])
                dist[k][better] = best[better]
                queues[k].push(bucket_of(best[better]), better)
            trace.add_compute(updates)

        def arcs_of(k, verts, light):
            t = dg.tasks[k]
            _, _, light_end = rows[k]
            lo = t.offsets[verts] if light else light_end[verts]
            hi = light_end[verts] if light else t.offsets[verts + 1]
            lens = hi - lo
            idx = np.repeat(lo - np.concatenate(([0], np.cumsum(lens)[:-1])), lens) + np.arange(int(lens.sum()))
            return np.repeat(verts, lens), idx.astype(np.int64)

        while True:
            keys = [q.min_live(bucket_of, d) for q, d in zip(queues, dist)]
            live = [k for k in keys if k is not None]
            if not live:
                break
            cur = min(live)
            buckets_done.append(cur)
            removed = [np.zeros(0, dtype=np.int64) for _ in dg.tasks]
            step = 0
            while True:
                front = [q.take(cur, bucket_of, d) for q, d in zip(queues, dist)]
                if not any(len(f) for f in front):
                    break
                removed = [np.union1d(r, f) for r, f in zip(removed, front)]
                relax(f"bucket{cur}-light{step}", [arcs_of(k, front[k], True) for k in range(dg.p)])
                step += 1
            relax(f"bucket{cur}-heavy", [arcs_of(k, removed[k], False) for k in range(dg.p)])
        trace.meta["buckets"] = buckets_done
    return dg.gather(dist, np.inf), trace
