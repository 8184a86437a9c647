"""Layout quality metrics: balance, cut, locality of the ordered adjacency
arrays, and edge replication under an n-hop guarantee."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass

import numpy as np

from .graph import Graph, bfs_levels, symmetrize
from .partition import Partition, part_tallies

REPORT_COLUMNS = ("graph", "partitioner", "ordering", "p", "seed",
                  "v_max", "e_max", "ec", "ec_max", "coloc", "gapsum", "replication",
                  "ec_max_norm", "ec_imp", "ec_max_imp", "violation")


def _tallies(g: Graph, part: Partition):
    if part.part_vertices is not None and len(part.part_vertices) == part.p:
        return part.part_vertices, part.part_edges, part.part_cut
    return part_tallies(g, part.assignment, part.p)


def balance(g: Graph, part: Partition) -> tuple[float, float]:
    """``(v_max, e_max)``: largest part load over the mean load.

    The edge load of a part counts every edge with at least one endpoint in
    it, against a mean of ``num_edges / p``.
    """
    pv, pe, _ = _tallies(g, part)
    v_max = float(pv.max() / (g.n / part.p)) if g.n else 0.0
    e_max = float(pe.max() / (g.num_edges / part.p)) if g.num_edges else 0.0
    return v_max, e_max


def edge_cut(g: Graph, part: Partition) -> tuple[float, int]:
    """``(cut arcs / m, cut arcs)``."""
    asg = part.assignment
    cut = int(np.count_nonzero(asg[g.sources()] != asg[g.adjacency]))
    return (cut / g.m if g.m else 0.0), cut


def max_part_cut(g: Graph, part: Partition) -> int:
    """Largest number of cut edges incident to a single part."""
    _, _, pc = _tallies(g, part)
    return int(pc.max()) if len(pc) else 0


def _row_breaks(g: Graph) -> np.ndarray:
    """Mask over ``diff(adjacency)``: True where both entries share a row."""
    same = np.ones(max(g.m - 1, 0), dtype=bool)
    starts = g.row_offsets[1:-1]
    starts = starts[(starts > 0) & (starts < g.m)]
    same[starts - 1] = False
    return same


def colocation_ratio(g: Graph) -> float:
    """Share of consecutive sorted-neighbour pairs whose ids differ by at most 1."""
    denom = int(np.maximum(g.degrees() - 1, 0).sum())
    if denom == 0:
        return 0.0
    gaps = np.diff(g.adjacency)[_row_breaks(g)]
    return float(np.count_nonzero(gaps <= 1) / denom)


def _log2_terms(gaps: np.ndarray) -> np.ndarray:
    """``log2(1 + gap)`` per entry, via ``math.log2`` on the distinct values so
    results do not depend on numpy's vectorised log kernel."""
    vals, inv = np.unique(gaps, return_inverse=True)
    table = np.array([math.log2(1 + int(x)) for x in vals.tolist()])
    return table[inv.reshape(-1)]


def _gap_terms(g: Graph) -> tuple[np.ndarray, np.ndarray]:
    """``(row, cost)`` per arc: the first arc of a row pays the source gap, the
    others pay the gap to the previous neighbour."""
    has = np.flatnonzero(g.degrees() > 0)
    first = np.abs(g.adjacency[g.row_offsets[has]] - has)
    same = _row_breaks(g)
    rows = np.concatenate((has, g.sources()[1:][same]))
    gaps = np.concatenate((first, np.diff(g.adjacency)[same]))
    return rows, _log2_terms(gaps)


def gap_costs(g: Graph) -> np.ndarray:
    """Per-vertex log gap cost: ``log2(1 + |u_1 - v|) + sum log2(1 + u_{i+1} - u_i)``."""
    rows, terms = _gap_terms(g)
    return np.bincount(rows, terms, minlength=g.n).astype(np.float64)


def gap_sum_ratio(g: Graph) -> float:
    """Total log gap cost over ``m * log2(n)``, clamped to [0, 1].

    The total is correctly rounded (``math.fsum``) so it does not depend on
    arc order.
    """
    if g.n < 2 or g.m == 0:
        return 0.0
    _, terms = _gap_terms(g)
    ratio = math.fsum(terms.tolist()) / (g.m * math.log2(g.n))
    return float(min(1.0, max(0.0, ratio)))


def replication_ratio(g: Graph, part: Partition, hops: int) -> float:
    """Edges stored across all parts under an undirected ``hops``-hop guarantee,
    divided by the edge count.

    Part ``k`` stores an edge when either endpoint lies within ``hops - 1``
    undirected hops of a vertex it owns.
    """
    if hops < 1:
        raise ValueError("hops must be >= 1")
    und = symmetrize(g) if g.directed else g
    u, v = g.edge_pairs()
    if not len(u):
        return 0.0
    stored = 0
    for members in part.parts():
        if not len(members):
            continue
        near = bfs_levels(und, members, max_depth=hops - 1) >= 0
        stored += int(np.count_nonzero(near[u] | near[v]))
    return stored / len(u)


@dataclass
class LayoutReport:
    graph: str
    partitioner: str
    ordering: str
    p: int
    seed: int
    v_max: float
    e_max: float
    ec: float
    ec_max: int
    coloc: float
    gapsum: float
    replication: float | None
    ec_max_norm: float
    ec_imp: float | None
    ec_max_imp: float | None
    violation: bool

    def row(self) -> list:
        d = asdict(self)
        return [_cell(d[c]) for c in REPORT_COLUMNS]


def _cell(x):
    if x is None:
        return ""
    if isinstance(x, bool):
        return int(x)
    if isinstance(x, float):
        return repr(x)
    return x


def layout_report(g: Graph, part: Partition, ordered: Graph | None = None, *, graph_name="graph",
                  partitioner="", ordering="", seed=0, hops: int | None = None,
                  baseline: Partition | None = None) -> LayoutReport:
    """All metrics for one (graph, partition, ordering) triple.

    ``ordered`` is the relabelled graph the locality ratios are read from
    (defaults to ``g``).  ``baseline`` (normally a random partition) feeds
    the improvement columns ``ec_imp`` and ``ec_max_imp``.
    """
    v_max, e_max = balance(g, part)
    ec, _ = edge_cut(g, part)
    ec_max = max_part_cut(g, part)
    _, _, pc = _tallies(g, part)
    mean_cut = pc.sum() / part.p
    ordered = g if ordered is None else ordered
    ec_imp = ec_max_imp = None
    if baseline is not None:
        b_ec, _ = edge_cut(g, baseline)
        b_max = max_part_cut(g, baseline)
        ec_imp = b_ec / ec if ec else math.inf
        ec_max_imp = b_max / ec_max if ec_max else math.inf
    return LayoutReport(
        graph_name, partitioner, ordering, part.p, seed, v_max, e_max, ec, ec_max,
        colocation_ratio(ordered), gap_sum_ratio(ordered),
        replication_ratio(g, part, hops) if hops else None,
        float(ec_max / mean_cut) if mean_cut else 0.0, ec_imp, ec_max_imp, bool(part.violation))


def write_report(reports, path_or_buf=None) -> str:
    """CSV with a fixed header; returns the text and writes it when a path is given."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_COLUMNS)
    for r in reports:
        w.writerow(r.row())
    text = buf.getvalue()
    if path_or_buf is not None:
        with open(path_or_buf, "w", newline="") as fh:
            fh.write(text)
    return text
