"""Graph file formats: whitespace edge lists, METIS ASCII and a binary CSR snapshot.

Binary snapshot layout (all little-endian)::

    b"GLCSR1"                 6-byte magic, doubles as the format version
    u64 n, u64 m, u64 flags   flags bit 0: weights present, bit 1: directed
    i64[n + 1] row offsets
    i64[m] adjacency
    f64[m] weights            only when flag bit 0 is set
"""

from __future__ import annotations

import math
import struct
from pathlib import Path

import numpy as np

from .errors import DomainError, GraphFormatError
from .graph import Graph

CSR_MAGIC = b"GLCSR1"
FORMATS = ("edgelist", "metis", "csr")


def load_edge_list(path, directed: bool = False) -> Graph:
    """Read ``u v [w]`` lines; ``#`` and ``%`` start comments.

    Vertex labels are compacted to ``[0, n)`` in order of first appearance.
    Duplicate lines are kept (``preprocess`` removes them).  Missing weights
    default to 1; the weight array is omitted when no line carries one.
    """
    ids: dict[int, int] = {}
    src, dst, wts = [], [], []
    weighted = False
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line[0] in "#%":
                continue
            tok = line.split()
            if len(tok) not in (2, 3):
                raise GraphFormatError(f"expected 'u v [w]', got {line!r}", lineno)
            try:
                u, v = int(tok[0]), int(tok[1])
                w = float(tok[2]) if len(tok) == 3 else 1.0
            except ValueError:
                raise GraphFormatError(f"non-numeric field in {line!r}", lineno) from None
            if len(tok) == 3:
                weighted = True
                if math.isnan(w):
                    raise GraphFormatError("weight is NaN", lineno)
                if w < 0:
                    raise DomainError(f"line {lineno}: negative weight {w}")
            src.append(ids.setdefault(u, len(ids)))
            dst.append(ids.setdefault(v, len(ids)))
            wts.append(w)
    n = len(ids)
    s = np.array(src, dtype=np.int64)
    d = np.array(dst, dtype=np.int64)
    w = np.array(wts, dtype=np.float64) if weighted else None
    if not directed:
        loop = s == d
        s, d = np.concatenate([s, d[~loop]]), np.concatenate([d, s[~loop]])
        if w is not None:
            w = np.concatenate([w, w[~loop]])
    return Graph.from_arcs(n, s, d, w, directed)


def save_edge_list(g: Graph, path) -> None:
    """Write each edge once (``u <= v`` for undirected graphs)."""
    u, v = g.edge_pairs()
    with open(path, "w") as fh:
        fh.write(f"# n={g.n} edges={len(u)} directed={int(g.directed)}\n")
        if g.weights is None:
            fh.writelines(f"{a} {b}\n" for a, b in zip(u.tolist(), v.tolist()))
        else:
            keep = np.ones(g.m, dtype=bool) if g.directed else g.sources() <= g.adjacency
            w = g.weights[keep]
            fh.writelines(f"{a} {b} {_fmt(c)}\n" for a, b, c in zip(u.tolist(), v.tolist(), w.tolist()))


def _fmt(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def load_metis(path) -> Graph:
    """Read a METIS graph file into an undirected graph with 0-based ids.

    Vertex sizes and vertex weights are parsed and discarded; edge weights
    (fmt digit ``xx1``) become arc weights.  Adjacency must be symmetric.
    """
    with open(path) as fh:
        lines = [(i, ln.strip()) for i, ln in enumerate(fh.read().splitlines(), 1)]
    lines = [(i, ln) for i, ln in lines if not ln.startswith("%")]
    if not lines:
        raise GraphFormatError("missing header")
    hline, header = lines[0]
    try:
        head = header.split()
        n, m = int(head[0]), int(head[1])
        fmt = head[2].zfill(3) if len(head) > 2 else "000"
        has_vsize, has_vwgt, has_ewgt = fmt[-3] == "1", fmt[-2] == "1", fmt[-1] == "1"
        ncon = int(head[3]) if len(head) > 3 else (1 if has_vwgt else 0)
    except (ValueError, IndexError):
        raise GraphFormatError(f"bad header {header!r}", hline) from None
    body = lines[1:]
    if len(body) < n:
        raise GraphFormatError(f"header declares {n} vertices but only {len(body)} lines follow", hline)
    extra = [i for i, ln in body[n:] if ln]
    if extra:
        raise GraphFormatError(f"more than {n} vertex lines", extra[0])
    src, dst, wts = [], [], []
    skip = int(has_vsize) + (ncon if has_vwgt else 0)
    step = 2 if has_ewgt else 1
    for v, (lineno, ln) in enumerate(body[:n]):
        try:
            vals = [float(t) if has_ewgt else int(t) for t in ln.split()][skip:]
        except ValueError:
            raise GraphFormatError(f"non-numeric entry in {ln!r}", lineno) from None
        if len(vals) % step:
            raise GraphFormatError("dangling edge weight", lineno)
        for j in range(0, len(vals), step):
            u = int(vals[j]) - 1
            if not 0 <= u < n or vals[j] != int(vals[j]):
                raise GraphFormatError(f"neighbour {vals[j]} outside [1, {n}]", lineno)
            if u == v:
                raise GraphFormatError("self-loop not allowed in METIS input", lineno)
            src.append(v)
            dst.append(u)
            if has_ewgt:
                w = vals[j + 1]
                if w < 0:
                    raise DomainError(f"line {lineno}: negative edge weight")
                wts.append(w)
    if len(src) != 2 * m:
        raise GraphFormatError(f"header declares {m} edges but adjacency lists hold {len(src)} entries", hline)
    g = Graph.from_arcs(n, src, dst, np.array(wts) if has_ewgt else None, directed=False)
    if not g.is_symmetric():
        raise GraphFormatError("adjacency is not symmetric")
    return g


def save_metis(g: Graph, path) -> None:
    if g.directed:
        raise DomainError("METIS format holds undirected graphs only")
    src = g.sources()
    if np.any(src == g.adjacency):
        raise DomainError("METIS format does not allow self-loops")
    weighted = g.weights is not None
    if weighted and not np.all(np.equal(np.mod(g.weights, 1), 0)):
        raise DomainError("METIS edge weights must be integers")
    with open(path, "w") as fh:
        fh.write(f"{g.n} {g.m // 2}" + (" 001" if weighted else "") + "\n")
        for v in range(g.n):
            nb = (g.neighbors(v) + 1).tolist()
            if weighted:
                ws = g.arc_weights(v).astype(np.int64).tolist()
                fh.write(" ".join(f"{a} {b}" for a, b in zip(nb, ws)) + "\n")
            else:
                fh.write(" ".join(map(str, nb)) + "\n")


def save_csr(g: Graph, path) -> None:
    flags = (1 if g.weights is not None else 0) | (2 if g.directed else 0)
    with open(path, "wb") as fh:
        fh.write(CSR_MAGIC)
        fh.write(struct.pack("<QQQ", g.n, g.m, flags))
        fh.write(g.row_offsets.astype("<i8").tobytes())
        fh.write(g.adjacency.astype("<i8").tobytes())
        if g.weights is not None:
            fh.write(g.weights.astype("<f8").tobytes())


def load_csr(path) -> Graph:
    data = Path(path).read_bytes()
    if data[:6] != CSR_MAGIC:
        raise GraphFormatError("not a GLCSR1 snapshot")
    if len(data) < 30:
        raise GraphFormatError("truncated header")
    n, m, flags = struct.unpack_from("<QQQ", data, 6)
    weighted = bool(flags & 1)
    expect = 30 + 8 * (n + 1) + 8 * m + (8 * m if weighted else 0)
    if len(data) != expect:
        raise GraphFormatError(f"snapshot is {len(data)} bytes, expected {expect}")
    pos = 30
    off = np.frombuffer(data, "<i8", n + 1, pos).astype(np.int64)
    pos += 8 * (n + 1)
    adj = np.frombuffer(data, "<i8", m, pos).astype(np.int64)
    pos += 8 * m
    w = np.frombuffer(data, "<f8", m, pos).astype(np.float64) if weighted else None
    g = Graph(off, adj, w, bool(flags & 2))
    try:
        g.validate()
    except DomainError as exc:
        raise GraphFormatError(f"inconsistent snapshot: {exc}") from None
    return g


def load_graph(path, fmt: str = "edgelist", directed: bool = False) -> Graph:
    if fmt == "edgelist":
        return load_edge_list(path, directed)
    if fmt == "metis":
        return load_metis(path)
    if fmt == "csr":
        return load_csr(path)
    raise ValueError(f"unknown graph format {fmt!r}")


def save_graph(g: Graph, path, fmt: str = "edgelist") -> None:
    if fmt == "edgelist":
        save_edge_list(g, path)
    elif fmt == "metis":
        save_metis(g, path)
    elif fmt == "csr":
        save_csr(g, path)
    else:
        raise ValueError(f"unknown graph format {fmt!r}")
