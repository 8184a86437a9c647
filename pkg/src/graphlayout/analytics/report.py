"""CSV output for bench traces and a deterministic BSP timeline model."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .distributed import BenchTrace

TRACE_COLUMNS = ("run_id", "analytic", "task", "phase", "compute_ops", "sent", "received")
TIMELINE_COLUMNS = ("run_id", "analytic", "phase", "name", "task",
                    "compute_start", "compute_end", "comm_start", "comm_end")
SUMMARY_COLUMNS = ("run_id", "analytic", "p", "phases", "total_sent", "max_task_sent",
                   "total_compute", "max_task_compute", "compute_imbalance", "model_time")


class ConservationError(AssertionError):
    pass


@dataclass(frozen=True)
class CostModel:
    """Abstract time units: per compute op, per record moved, per exchange."""

    op: float = 1.0
    record: float = 4.0
    latency: float = 100.0


def _csv(header, rows, path=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text


def check_conservation(trace: BenchTrace) -> None:
    for idx, ph in enumerate(trace.phases):
        if not ph.conserved():
            raise ConservationError(f"{trace.analytic} phase {idx} ({ph.name}): sends and receives disagree")


def trace_rows(trace: BenchTrace, run_id: str):
    check_conservation(trace)
    for idx, ph in enumerate(trace.phases):
        sent = ph.sent.sum(axis=1)
        recv = ph.received.sum(axis=1)
        for task in range(trace.p):
            yield (run_id, trace.analytic, task, idx, int(ph.compute_ops[task]), int(sent[task]), int(recv[task]))


def write_trace(traces: dict[str, BenchTrace], path=None) -> str:
    """One row per (run, phase, task).  ``traces`` maps run ids to traces."""
    rows = [r for run_id, tr in traces.items() for r in trace_rows(tr, run_id)]
    return _csv(TRACE_COLUMNS, rows, path)


def timeline(trace: BenchTrace, model: CostModel = CostModel()):
    """Simulated start/end of each task's compute and exchange per phase.

    Compute runs from the phase start; the exchange starts once the slowest
    task has finished computing and the phase ends when the slowest task
    has moved its records.
    """
    rows = []
    clock = 0.0
    for idx, ph in enumerate(trace.phases):
        compute = ph.compute_ops * model.op
        comm = (ph.sent.sum(axis=1) + ph.received.sum(axis=1)) * model.record + model.latency
        barrier = clock + float(compute.max(initial=0.0))
        for task in range(trace.p):
            rows.append((idx, ph.name, task, clock, clock + float(compute[task]),
                         barrier, barrier + float(comm[task])))
        clock = barrier + float(comm.max(initial=0.0))
    return rows, clock


def write_timeline(traces: dict[str, BenchTrace], path=None, model: CostModel = CostModel()) -> str:
    rows = []
    for run_id, tr in traces.items():
        check_conservation(tr)
        for r in timeline(tr, model)[0]:
            rows.append((run_id, tr.analytic) + tuple(repr(x) if isinstance(x, float) else x for x in r))
    return _csv(TIMELINE_COLUMNS, rows, path)


def summary_row(trace: BenchTrace, run_id: str, model: CostModel = CostModel()):
    sent = trace.sent_per_task()
    comp = trace.compute_per_task()
    mean = comp.mean() if len(comp) else 0.0
    imb = float(comp.max() / mean) if mean else 0.0
    return (run_id, trace.analytic, trace.p, len(trace.phases), int(sent.sum()), int(sent.max(initial=0)),
            int(comp.sum()), int(comp.max(initial=0)), repr(imb), repr(timeline(trace, model)[1]))


def write_summary(traces: dict[str, BenchTrace], path=None, model: CostModel = CostModel()) -> str:
    for tr in traces.values():
        check_conservation(tr)
    return _csv(SUMMARY_COLUMNS, [summary_row(tr, rid, model) for rid, tr in traces.items()], path)


def trace_report(traces: dict[str, BenchTrace], out_dir=None, prefix: str = "bench") -> dict[str, str]:
    """Trace, timeline and summary CSV texts; written to ``out_dir`` when given."""
    import os

    names = {"trace": f"{prefix}_trace.csv", "timeline": f"{prefix}_timeline.csv",
             "summary": f"{prefix}_summary.csv"}
    paths = {k: (os.path.join(out_dir, v) if out_dir is not None else None) for k, v in names.items()}
    return {
        "trace": write_trace(traces, paths["trace"]),
        "timeline": write_timeline(traces, paths["timeline"]),
        "summary": write_summary(traces, paths["summary"]),
    }


def volume_matrix(trace: BenchTrace) -> np.ndarray:
    """Total records sent from task i to task j over the run."""
    return sum((ph.sent for ph in trace.phases), np.zeros((trace.p, trace.p), dtype=np.int64))
