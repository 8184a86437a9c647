"""Timeline figures for bench runs (written to PNG files)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .analytics.distributed import BenchTrace  # noqa: E402
from .analytics.report import CostModel, timeline  # noqa: E402


def plot_timeline(trace: BenchTrace, path, model: CostModel = CostModel(), title: str | None = None) -> None:
    """Per-task bars: compute in blue, exchange in orange, on the model clock."""
    rows, end = timeline(trace, model)
    fig, ax = plt.subplots(figsize=(8, 0.4 * trace.p + 1.5))
    for _, _, task, c0, c1, m0, m1 in rows:
        ax.barh(task, c1 - c0, left=c0, color="tab:blue", height=0.8)
        ax.barh(task, m1 - m0, left=m0, color="tab:orange", height=0.8)
    ax.set_xlim(0, max(end, 1.0))
    ax.set_yticks(range(trace.p))
    ax.set_ylabel("task")
    ax.set_xlabel("model time")
    ax.invert_yaxis()
    ax.set_title(title or f"{trace.analytic} timeline")
    fig.tight_layout()
    fig.savefig(path, dpi=100, metadata={"Software": None})
    plt.close(fig)
