"""1D vertex distribution over p simulated tasks and all-to-all accounting.

Tasks run phase-synchronously inside one process.  Every all-to-all moves
record arrays between per-task buffers; the sender side and the receiver
side are tallied independently so conservation can be checked.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from ..errors import DomainError
from ..graph import Graph


@dataclass
class TaskGraph:
    """Out-arcs of the vertices owned by one task.

    ``adjacency`` holds global ids.  ``ghosts`` lists the remote vertices
    referenced by those arcs (ascending) with their owner and their index in
    the owner's ``owned`` array.
    """

    rank: int
    owned: np.ndarray
    offsets: np.ndarray
    adjacency: np.ndarray
    weights: np.ndarray | None
    ghosts: np.ndarray
    ghost_owner: np.ndarray
    ghost_index: np.ndarray

    @property
    def n_local(self) -> int:
        return len(self.owned)

    def local_sources(self) -> np.ndarray:
        return np.repeat(np.arange(self.n_local, dtype=np.int64), np.diff(self.offsets))


@dataclass
class DistributedGraph:
    n: int
    p: int
    directed: bool
    owner: np.ndarray
    local_index: np.ndarray
    tasks: list[TaskGraph]
    keys: np.ndarray

    def gather(self, per_task: list[np.ndarray], fill=0) -> np.ndarray:
        """Assemble per-task owned-vertex arrays into one global array."""
        dtype = per_task[0].dtype if per_task else np.float64
        out = np.full(self.n, fill, dtype=dtype)
        for t, vals in zip(self.tasks, per_task):
            out[t.owned] = vals
        return out

    def validate(self, g: Graph | None = None) -> None:
        seen = np.zeros(self.n, dtype=np.int64)
        arcs = 0
        for t in self.tasks:
            seen[t.owned] += 1
            if not np.all(self.owner[t.owned] == t.rank):
                raise DomainError("owner table disagrees with task ownership")
            remote = np.unique(t.adjacency[self.owner[t.adjacency] != t.rank])
            if not np.array_equal(remote, t.ghosts):
                raise DomainError(f"ghost table of task {t.rank} is inconsistent")
            if not (np.array_equal(self.owner[t.ghosts], t.ghost_owner)
                    and np.array_equal(self.local_index[t.ghosts], t.ghost_index)):
                raise DomainError(f"ghost owners of task {t.rank} are inconsistent")
            arcs += len(t.adjacency)
        if np.any(seen != 1):
            raise DomainError("every vertex must be owned by exactly one task")
        if g is not None:
            if arcs != g.m:
                raise DomainError("local arc sets do not cover the global arc set")
            src = np.concatenate([t.owned[t.local_sources()] for t in self.tasks])
            dst = np.concatenate([t.adjacency for t in self.tasks])
            order = np.lexsort((dst, src))
            if not (np.array_equal(src[order], g.sources()) and np.array_equal(dst[order], g.adjacency)):
                raise DomainError("local arc sets differ from the global arc set")


def distribute(g: Graph, part, keys=None) -> DistributedGraph:
    """Split ``g`` by ``part`` (anything with ``p`` and ``assignment``).

    ``keys`` are stable per-vertex identities (original ids before any
    relabelling); randomised analytics derive their per-vertex randomness
    from them.  Defaults to the current ids.
    """
    asg = np.asarray(part.assignment, dtype=np.int64)
    if len(asg) != g.n:
        raise DomainError("partition does not match graph")
    p = int(part.p)
    order = np.argsort(asg, kind="stable")
    bounds = np.searchsorted(asg[order], np.arange(p + 1))
    local_index = np.empty(g.n, dtype=np.int64)
    tasks = []
    for k in range(p):
        owned = order[bounds[k]:bounds[k + 1]]
        local_index[owned] = np.arange(len(owned))
    for k in range(p):
        owned = order[bounds[k]:bounds[k + 1]]
        deg = g.row_offsets[owned + 1] - g.row_offsets[owned]
        offsets = np.concatenate(([0], np.cumsum(deg))).astype(np.int64)
        idx = np.concatenate([np.arange(g.row_offsets[v], g.row_offsets[v + 1]) for v in owned]) \
            if len(owned) else np.zeros(0, dtype=np.int64)
        idx = idx.astype(np.int64)
        adj = g.adjacency[idx]
        w = None if g.weights is None else g.weights[idx]
        ghosts = np.unique(adj[asg[adj] != k])
        tasks.append(TaskGraph(k, owned, offsets, adj, w, ghosts, asg[ghosts], local_index[ghosts]))
    keys = np.arange(g.n, dtype=np.int64) if keys is None else np.asarray(keys, dtype=np.int64)
    if len(keys) != g.n:
        raise DomainError("keys must have one entry per vertex")
    return DistributedGraph(g.n, p, g.directed, asg.copy(), local_index, tasks, keys)


@dataclass
class PhaseRecord:
    """One compute + all-to-all phase.

    ``sent[i, j]`` is what task i put in its outbox for j, ``received[j, i]``
    what j found in its inbox from i.
    """

    name: str
    compute_ops: np.ndarray
    sent: np.ndarray
    received: np.ndarray

    def conserved(self) -> bool:
        return np.array_equal(self.sent, self.received.T)


@dataclass
class BenchTrace:
    analytic: str
    p: int
    phases: list[PhaseRecord] = field(default_factory=list)
    meta: dict = field(default_factory=dict)
    wall_time: float = 0.0

    def exchange(self, name: str, compute_ops, outboxes):
        """All-to-all: ``outboxes[i]`` maps peer j to a tuple of equal-length
        record arrays.  Returns ``inboxes[j]`` as a list of ``(i, records)``
        sorted by sender.  Self-addressed records are not allowed."""
        p = self.p
        sent = np.zeros((p, p), dtype=np.int64)
        received = np.zeros((p, p), dtype=np.int64)
        inboxes: list[list] = [[] for _ in range(p)]
        for i in range(p):
            for j, recs in sorted(outboxes[i].items()):
                if j == i:
                    raise ValueError("task addressed a record to itself")
                size = len(recs[0])
                if size == 0:
                    continue
                sent[i, j] += size
                inboxes[j].append((i, tuple(np.array(r, copy=True) for r in recs)))
        for j in range(p):
            for i, recs in inboxes[j]:
                received[j, i] += len(recs[0])
        self.phases.append(PhaseRecord(name, np.asarray(compute_ops, dtype=np.int64).copy(), sent, received))
        return inboxes

    def add_compute(self, ops) -> None:
        """Charge post-exchange local-update work to the latest phase."""
        self.phases[-1].compute_ops += np.asarray(ops, dtype=np.int64)

    def conserved(self) -> bool:
        return all(ph.conserved() for ph in self.phases)

    def total_sent(self) -> int:
        return int(sum(ph.sent.sum() for ph in self.phases))

    def sent_per_task(self) -> np.ndarray:
        return sum((ph.sent.sum(axis=1) for ph in self.phases), np.zeros(self.p, dtype=np.int64))

    def received_per_task(self) -> np.ndarray:
        return sum((ph.received.sum(axis=1) for ph in self.phases), np.zeros(self.p, dtype=np.int64))

    def compute_per_task(self) -> np.ndarray:
        return sum((ph.compute_ops for ph in self.phases), np.zeros(self.p, dtype=np.int64))


class _Timer:
    def __init__(self, trace: BenchTrace):
        self.trace = trace

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self.trace

    def __exit__(self, *exc):
        self.trace.wall_time = time.perf_counter() - self.t0
        return False


def timed(trace: BenchTrace) -> _Timer:
    return _Timer(trace)


def group_by_owner(dg: DistributedGraph, rank: int, ids: np.ndarray, *vals):
    """Split remote records by owner task: ``{owner: (ids, *vals)}``."""
    if not len(ids):
        return {}
    own = dg.owner[ids]
    order = np.argsort(own, kind="stable")
    own_s = own[order]
    cuts = np.flatnonzero(np.diff(own_s)) + 1
    out = {}
    for chunk in np.split(np.arange(len(ids)), cuts):
        j = int(own_s[chunk[0]])
        sel = order[chunk]
        out[j] = (ids[sel],) + tuple(v[sel] for v in vals)
    return out
