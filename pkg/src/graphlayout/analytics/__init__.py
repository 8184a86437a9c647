"""Distributed-memory analytics simulated over p in-process tasks."""

from .distributed import BenchTrace, DistributedGraph, PhaseRecord, TaskGraph, distribute
from .pagerank import pagerank, pagerank_dense
from .report import CostModel, trace_report, write_summary, write_timeline, write_trace
from .subgraph import TemplateTree, count_subgraphs, path_template, star_template
from .traversal import UNREACHED, bfs, default_delta, sssp_delta

__all__ = [
    "BenchTrace", "CostModel", "DistributedGraph", "PhaseRecord", "TaskGraph", "TemplateTree", "UNREACHED",
    "bfs", "count_subgraphs", "default_delta", "distribute", "pagerank", "pagerank_dense", "path_template",
    "sssp_delta", "star_template", "trace_report", "write_summary", "write_timeline", "write_trace",
]
