"""p-way vertex partitioners: random and block baselines plus a
label-propagation partitioner with vertex/edge balance constraints and an
optional max-per-part-cut objective.

Tally conventions (shared with :mod:`graphlayout.metrics`): an edge is
counted in ``part_edges[k]`` when part ``k`` owns at least one endpoint, and
in ``part_cut[k]`` when it is cut and ``k`` owns one endpoint.  Cut edges
are therefore counted once per incident part.
"""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, GraphFormatError
from .graph import Graph
from .rng import substream

VERTEX = "vertex"
EDGE = "edge"
MODES = ("M", "MM")


def part_tallies(g: Graph, assignment: np.ndarray, p: int):
    """Per-part vertex, edge and cut-edge counts recomputed from scratch."""
    assignment = np.asarray(assignment, dtype=np.int64)
    u, v = g.edge_pairs()
    a, b = assignment[u], assignment[v]
    cut = a != b
    vertices = np.bincount(assignment, minlength=p)
    edges = np.bincount(a, minlength=p) + np.bincount(b[cut], minlength=p)
    cuts = np.bincount(a[cut], minlength=p) + np.bincount(b[cut], minlength=p)
    return vertices, edges, cuts


@dataclass(eq=False)
class Partition:
    """Vertex-to-part assignment with cached per-part tallies.

    Tallies are ``None`` for a partition read from disk without its graph;
    :meth:`with_graph` fills them in.
    """

    p: int
    assignment: np.ndarray
    part_vertices: np.ndarray | None = None
    part_edges: np.ndarray | None = None
    part_cut: np.ndarray | None = None
    violation: bool = False
    notes: list[str] = field(default_factory=list)

    @classmethod
    def from_assignment(cls, g: Graph, assignment, p: int, violation: bool = False, notes=None) -> "Partition":
        assignment = np.asarray(assignment, dtype=np.int64)
        if assignment.shape != (g.n,):
            raise DomainError(f"assignment length {len(assignment)} != n={g.n}")
        if len(assignment) and (assignment.min() < 0 or assignment.max() >= p):
            raise DomainError(f"part id outside [0, {p})")
        pv, pe, pc = part_tallies(g, assignment, p)
        return cls(p, assignment, pv, pe, pc, violation, list(notes or []))

    def with_graph(self, g: Graph) -> "Partition":
        return Partition.from_assignment(g, self.assignment, self.p, self.violation, self.notes)

    def verify(self, g: Graph) -> bool:
        """True when the cached tallies equal a fresh recomputation."""
        pv, pe, pc = part_tallies(g, self.assignment, self.p)
        return (np.array_equal(pv, self.part_vertices) and np.array_equal(pe, self.part_edges)
                and np.array_equal(pc, self.part_cut))

    def parts(self) -> list[np.ndarray]:
        """Vertices of each part, ascending."""
        order = np.argsort(self.assignment, kind="stable")
        bounds = np.searchsorted(self.assignment[order], np.arange(self.p + 1))
        return [order[bounds[k]:bounds[k + 1]] for k in range(self.p)]

    def permuted(self, perm: np.ndarray, g_new: Graph | None = None) -> "Partition":
        """Same partition expressed in relabelled ids (``perm[old] = new``)."""
        asg = np.empty_like(self.assignment)
        asg[perm] = self.assignment
        if g_new is None:
            return Partition(self.p, asg, violation=self.violation, notes=list(self.notes))
        return Partition.from_assignment(g_new, asg, self.p, self.violation, self.notes)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        return self.p == other.p and np.array_equal(self.assignment, other.assignment)

    __hash__ = None


@dataclass
class PartitionConfig:
    """Settings for :func:`partition_lp`.

    ``k1``/``k2`` are the outer balance/refine rounds for the vertex and the
    edge stage; ``balance_iters``/``refine_iters`` cap the sweeps inside one
    stage (each stage exits early once a sweep moves nothing).
    """

    p: int
    vertex_imbalance: float = 1.10
    edge_imbalance: float = 1.50
    k1: int = 3
    k2: int = 3
    lp_iters: int = 10
    balance_iters: int = 5
    refine_iters: int = 10
    seed: int = 0
    mode: str = "MM"
    deterministic: bool = True
    threads: int = 4

    def __post_init__(self):
        self.mode = self.mode.upper()
        if self.p < 1:
            raise DomainError("p must be >= 1")
        if self.vertex_imbalance < 1 or self.edge_imbalance < 1:
            raise DomainError("imbalance ratios must be >= 1")
        if self.mode not in MODES:
            raise DomainError(f"mode must be one of {MODES}")


def partition_random(g: Graph, p: int, seed: int = 0) -> Partition:
    if p < 1:
        raise DomainError("p must be >= 1")
    asg = substream(seed, "partition", 0).integers(0, p, size=g.n, dtype=np.int64)
    return Partition.from_assignment(g, asg, p)


def partition_block(g: Graph, p: int) -> Partition:
    """Contiguous id ranges; the first ``n % p`` parts get one extra vertex."""
    if p < 1:
        raise DomainError("p must be >= 1")
    base, extra = divmod(g.n, p)
    sizes = np.full(p, base, dtype=np.int64)
    sizes[:extra] += 1
    return Partition.from_assignment(g, np.repeat(np.arange(p), sizes), p)


class _LPState:
    """Mutable label state with incrementally maintained tallies."""

    def __init__(self, g: Graph, cfg: PartitionConfig, labels, rng):
        src = g.sources()
        loops = np.bincount(src[src == g.adjacency], minlength=g.n)
        self.nbrs = [row[row != v].tolist() for v, row in enumerate(np.split(g.adjacency, g.row_offsets[1:-1]))] \
            if g.n else []
        self.loops = loops.tolist()
        self.deg = [len(x) for x in self.nbrs]
        self.n = g.n
        self.p = cfg.p
        self.g = g
        self.cfg = cfg
        self.rng = rng
        self.labels = list(labels)
        self.max_v = cfg.vertex_imbalance * g.n / cfg.p
        self.max_e = cfg.edge_imbalance * g.num_edges / cfg.p
        self.recount()

    def recount(self):
        pv, pe, pc = part_tallies(self.g, np.array(self.labels, dtype=np.int64), self.p)
        self.size, self.edges, self.cut = pv.tolist(), pe.tolist(), pc.tolist()

    def counts(self, v) -> Counter:
        return Counter(map(self.labels.__getitem__, self.nbrs[v]))

    def move(self, v, b, cnt):
        a = self.labels[v]
        d, lp = self.deg[v], self.loops[v]
        na, nb = cnt.get(a, 0), cnt.get(b, 0)
        self.size[a] -= 1
        self.size[b] += 1
        self.edges[a] -= d - na + lp
        self.edges[b] += d - nb + lp
        self.cut[a] += 2 * na - d
        self.cut[b] += d - 2 * nb
        self.labels[v] = b

    def cut_after(self, v, b, cnt):
        a = self.labels[v]
        d = self.deg[v]
        na, nb = cnt.get(a, 0), cnt.get(b, 0)
        return self.cut[a] + 2 * na - d, self.cut[b] + d - 2 * nb

    def sweep(self, visit) -> int:
        """Apply ``visit(v) -> moved`` to every vertex; returns the move count."""
        if self.cfg.deterministic or self.n < 2:
            return sum(1 for v in range(self.n) if visit(v))
        # Racy by design: workers read and write shared labels without locks.
        chunks = np.array_split(np.arange(self.n), max(1, self.cfg.threads))
        with ThreadPoolExecutor(max_workers=self.cfg.threads) as pool:
            moved = sum(pool.map(lambda ch: sum(1 for v in ch.tolist() if visit(v)), chunks))
        self.recount()
        return moved

    def as_partition(self, violation=False, notes=None) -> Partition:
        return Partition.from_assignment(self.g, np.array(self.labels, dtype=np.int64), self.p, violation, notes)


def _initial_labels(g: Graph, cfg: PartitionConfig, rng) -> list[int]:
    """Degree-weighted label propagation grown from ``p`` random seed vertices."""
    n, p = g.n, cfg.p
    nbrs = [row.tolist() for row in np.split(g.adjacency, g.row_offsets[1:-1])] if n else []
    inv_deg = [1.0 / len(x) if x else 0.0 for x in nbrs]
    labels = [-1] * n
    for k, v in enumerate(rng.choice(n, size=p, replace=False).tolist()):
        labels[v] = k
    ties = rng.random(n * cfg.lp_iters + 1).tolist()
    t = 0
    for _ in range(cfg.lp_iters):
        changed = 0
        for v in range(n):
            score: dict[int, float] = {}
            for u in nbrs[v]:
                lab = labels[u]
                if lab >= 0 and u != v:
                    score[lab] = score.get(lab, 0.0) + inv_deg[u]
            if not score:
                continue
            best = max(score.values())
            cur = labels[v]
            if cur >= 0 and score.get(cur, -1.0) >= best:
                continue
            cands = sorted(k for k, s in score.items() if s >= best)
            new = cands[int(ties[t] * len(cands))] if len(cands) > 1 else cands[0]
            t += 1
            if new != cur:
                labels[v] = new
                changed += 1
        if changed == 0:
            break
    sizes = Counter(lab for lab in labels if lab >= 0)
    for v in range(n):
        if labels[v] < 0:
            k = min(range(p), key=lambda j: (sizes.get(j, 0), j))
            labels[v] = k
            sizes[k] += 1
    return labels


def _repair_empty(st: _LPState) -> None:
    """Give every empty part the least-attached vertex of the largest part."""
    for e in range(st.p):
        if st.size[e]:
            continue
        big = max(range(st.p), key=lambda k: (st.size[k], -k))
        if st.size[big] < 2:
            continue
        best, best_key = None, None
        for v in range(st.n):
            if st.labels[v] != big:
                continue
            cnt = st.counts(v)
            key = (cnt.get(big, 0) - cnt.get(e, 0), st.deg[v], v)
            if best_key is None or key < best_key:
                best, best_key = v, key
        st.move(best, e, st.counts(best))


def _balance(st: _LPState, target: str) -> None:
    """Weighted label propagation pulling vertices toward under-filled parts.

    Scores are neighbour counts scaled by ``max(0, 1 - load/limit)`` of the
    constrained quantity.  A move is only taken when the destination stays
    within ``min(initial max load, limit)``, so the maximum load never grows.
    In ``MM`` mode the edge stage also subtracts the part's cut relative to
    the mean per-part cut and rejects moves that raise the current max cut.
    """
    cfg = st.cfg
    _repair_empty(st)
    mm = target == EDGE and cfg.mode == "MM"
    if target == VERTEX:
        limit = st.max_v
        cap = min(max(st.size), math.floor(limit + 1e-9))
        vcap = cap
    else:
        limit = st.max_e
        cap = min(max(st.edges), limit + 1e-9)
        vcap = max(math.floor(st.max_v + 1e-9), max(st.size))

    def load(k):
        return st.size[k] if target == VERTEX else st.edges[k]

    def visit(v):
        a = st.labels[v]
        if st.size[a] <= 1:
            return False
        cnt = st.counts(v)
        if not cnt:
            return False
        d, lp = st.deg[v], st.loops[v]
        cut_ref = max(1.0, sum(st.cut) / st.p)
        max_cut = max(st.cut) if mm else 0

        def score(k, c):
            s = c * max(0.0, 1.0 - load(k) / limit)
            if mm:
                s -= st.cut[k] / cut_ref
            return s

        best, best_s = a, score(a, cnt.get(a, 0))
        for k, c in cnt.items():
            if k == a:
                continue
            grow = 1 if target == VERTEX else d - c + lp
            if load(k) + grow > cap or st.size[k] + 1 > vcap:
                continue
            s = score(k, c)
            if s > best_s:
                if mm:
                    ca, cb = st.cut_after(v, k, cnt)
                    if max(ca, cb) > max_cut:
                        continue
                best, best_s = k, s
        if best != a:
            st.move(v, best, cnt)
            return True
        return False

    for _ in range(cfg.balance_iters):
        if st.sweep(visit) == 0:
            break
    _force_balance(st, target, vcap)


def _force_balance(st: _LPState, target: str, vcap: int) -> None:
    """Greedy evacuation of overloaded parts when propagation alone stalls."""
    limit = st.max_v if target == VERTEX else st.max_e
    vlimit = math.floor(st.max_v + 1e-9)
    for _ in range(4):
        loads = st.size if target == VERTEX else st.edges
        over = [k for k in range(st.p) if loads[k] > limit + 1e-9]
        if not over:
            return
        for a in over:
            cands = []
            for v in range(st.n):
                if st.labels[v] != a:
                    continue
                cnt = st.counts(v)
                na = cnt.get(a, 0)
                cands.append((na - max((c for k, c in cnt.items() if k != a), default=0), v))
            cands.sort()
            for _, v in cands:
                loads = st.size if target == VERTEX else st.edges
                if loads[a] <= limit + 1e-9 or st.size[a] <= 1:
                    break
                cnt = st.counts(v)
                d, lp = st.deg[v], st.loops[v]
                best, best_key = None, None
                for k in range(st.p):
                    if k == a or st.size[k] + 1 > (vlimit if target == VERTEX else vcap):
                        continue
                    c = cnt.get(k, 0)
                    if target == EDGE and st.edges[k] + d - c + lp > limit:
                        continue
                    key = (-c, loads[k], k)
                    if best_key is None or key < best_key:
                        best, best_key = k, key
                if best is not None:
                    st.move(v, best, cnt)


def _refine(st: _LPState, edge_stage: bool) -> None:
    """Greedy cut-reducing moves: a vertex joins the part holding strictly
    more of its neighbours, subject to the active balance limits."""
    cfg = st.cfg
    vcap = max(math.floor(st.max_v + 1e-9), max(st.size))
    ecap = max(st.max_e + 1e-9, max(st.edges)) if edge_stage else math.inf
    mm = edge_stage and cfg.mode == "MM"

    def visit(v):
        a = st.labels[v]
        if st.size[a] <= 1:
            return False
        cnt = st.counts(v)
        best, best_c = a, cnt.get(a, 0)
        d, lp = st.deg[v], st.loops[v]
        max_cut = max(st.cut) if mm else 0
        for k, c in cnt.items():
            if c <= best_c or k == a:
                continue
            if st.size[k] + 1 > vcap or st.edges[k] + d - c + lp > ecap:
                continue
            if mm and max(st.cut_after(v, k, cnt)) > max_cut:
                continue
            best, best_c = k, c
        if best != a:
            st.move(v, best, cnt)
            return True
        return False

    for _ in range(cfg.refine_iters):
        if st.sweep(visit) == 0:
            break


def _state_from(g: Graph, part: Partition, cfg: PartitionConfig) -> _LPState:
    if g.directed:
        raise DomainError("label propagation needs an undirected graph; symmetrize first")
    if part.p != cfg.p:
        cfg = PartitionConfig(**{**cfg.__dict__, "p": part.p})
    return _LPState(g, cfg, part.assignment.tolist(), substream(cfg.seed, "partition", 1))


def refine_edge_cut(g: Graph, part: Partition, cfg: PartitionConfig, edge_stage: bool = False) -> Partition:
    """One refinement stage; the edge cut never increases (deterministic mode)."""
    st = _state_from(g, part, cfg)
    if st.p > 1:
        _refine(st, edge_stage)
    return st.as_partition()


def balance_stage(g: Graph, part: Partition, cfg: PartitionConfig, target: str = VERTEX) -> Partition:
    """One balancing stage for ``target`` in {"vertex", "edge"}; empty parts are refilled."""
    if target not in (VERTEX, EDGE):
        raise ValueError(f"target must be {VERTEX!r} or {EDGE!r}")
    st = _state_from(g, part, cfg)
    if st.p > 1:
        _balance(st, target)
    return st.as_partition()


def constraint_report(g: Graph, part: Partition, cfg: PartitionConfig) -> list[str]:
    """Human-readable list of unmet constraints (empty when all hold)."""
    out = []
    pv, pe = part.part_vertices, part.part_edges
    if np.any(pv == 0):
        out.append("empty part")
    if g.n:
        v_max = pv.max() / (g.n / part.p)
        if v_max > cfg.vertex_imbalance + 1e-12:
            out.append(f"vertex balance {v_max:.4f} > {cfg.vertex_imbalance}")
    if g.num_edges:
        e_max = pe.max() / (g.num_edges / part.p)
        if e_max > cfg.edge_imbalance + 1e-12:
            out.append(f"edge balance {e_max:.4f} > {cfg.edge_imbalance}")
    return out


def partition_lp(g: Graph, cfg: PartitionConfig) -> Partition:
    """Label-propagation partitioning with vertex and edge balance.

    Degree-weighted propagation from ``p`` seeds, then ``k1`` rounds of
    vertex balancing + cut refinement and ``k2`` rounds of edge balancing
    (plus max-cut minimisation in ``MM`` mode) + refinement.  Unmet
    constraints set ``violation`` and are listed in ``notes``.
    """
    if g.directed:
        raise DomainError("label propagation needs an undirected graph; symmetrize first")
    if cfg.p > g.n:
        raise DomainError(f"p={cfg.p} exceeds n={g.n}")
    if cfg.p == 1:
        return Partition.from_assignment(g, np.zeros(g.n, dtype=np.int64), 1)
    rng = substream(cfg.seed, "partition", 1)
    st = _LPState(g, cfg, _initial_labels(g, cfg, rng), rng)
    for _ in range(cfg.k1):
        _balance(st, VERTEX)
        _refine(st, edge_stage=False)
    for _ in range(cfg.k2):
        _balance(st, EDGE)
        _refine(st, edge_stage=True)
    _repair_empty(st)
    part = st.as_partition()
    notes = constraint_report(g, part, cfg)
    part.violation = bool(notes)
    part.notes = notes
    return part


def save_partition(part: Partition, path) -> None:
    with open(path, "w") as fh:
        fh.writelines(f"{k}\n" for k in part.assignment.tolist())


def load_partition(path, p: int | None = None, g: Graph | None = None) -> Partition:
    """Read one part id per line (line i = vertex i).

    ``p`` defaults to ``max id + 1``.  With ``g`` the length is checked and
    tallies are filled in.
    """
    ids = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if not s:
                continue
            try:
                k = int(s)
            except ValueError:
                raise GraphFormatError(f"part id {s!r} is not an integer", lineno) from None
            if k < 0 or (p is not None and k >= p):
                raise GraphFormatError(f"part id {k} outside [0, {p})", lineno)
            ids.append(k)
    asg = np.array(ids, dtype=np.int64)
    if p is None:
        p = int(asg.max()) + 1 if len(asg) else 1
    if g is not None:
        if len(asg) != g.n:
            raise GraphFormatError(f"partition has {len(asg)} entries, graph has {g.n} vertices")
        return Partition.from_assignment(g, asg, p)
    return Partition(p, asg)
