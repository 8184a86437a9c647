import numpy as np
import pytest

from graphlayout import generators as gen
from graphlayout.analytics import bfs, distribute, pagerank
from graphlayout.cli import main, run_bench
from graphlayout.graph import apply_ordering
from graphlayout.io import load_edge_list, save_edge_list
from graphlayout.ordering import order_dgl
from graphlayout.partition import PartitionConfig, partition_lp


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture
def cycle6(tmp_path):
    assert run("--out", tmp_path, "generate", "cycle", "--n", 6) == 0
    return tmp_path / "cycle.txt"


def test_generate_cycle(cycle6):
    g = load_edge_list(cycle6)
    assert g.num_edges == 6


def test_generate_invalid_params(tmp_path):
    assert run("--out", tmp_path, "generate", "cycle", "--n", 2) == 1


def test_partition_lp_mm_cycle(tmp_path, cycle6, capsys):
    assert run("--out", tmp_path, "partition", cycle6, "--parts", 2, "--partitioner", "lp-mm") == 0
    assert len((tmp_path / "cycle.part").read_text().split()) == 6
    row = (tmp_path / "cycle.partition.csv").read_text().splitlines()
    header, values = row[0].split(","), row[1].split(",")
    assert float(values[header.index("ec")]) == 4 / 12


def test_partition_p1(tmp_path, cycle6):
    assert run("--out", tmp_path, "partition", cycle6, "--parts", 1, "--partitioner", "lp") == 0
    assert (tmp_path / "cycle.part").read_text().split() == ["0"] * 6


def test_partition_violation_exit_code(tmp_path):
    assert run("--out", tmp_path, "generate", "star", "--n", 31) == 0
    code = run("--out", tmp_path, "partition", tmp_path / "star.txt", "--parts", 4)
    assert code == 3
    assert (tmp_path / "star.part").exists()


def test_missing_input_is_io_error(tmp_path):
    assert run("--out", tmp_path, "partition", tmp_path / "nope.txt", "--parts", 2) == 2


def test_bad_file_is_io_error(tmp_path):
    (tmp_path / "bad.txt").write_text("0 1\nfoo\n")
    assert run("--out", tmp_path, "metrics", tmp_path / "bad.txt") == 2


def test_order_dgl_pinned_root(tmp_path):
    save_edge_list(gen.path(5), tmp_path / "p.txt")
    assert run("--out", tmp_path, "order", tmp_path / "p.txt", "--ordering", "dgl", "--root", 0) == 0
    assert (tmp_path / "p.order").read_text().split() == ["4", "3", "2", "1", "0"]


def test_order_then_metrics_equals_in_process(tmp_path):
    g = gen.planted(4, 30, 0.3, 0.02, seed=1, shuffle=True)
    save_edge_list(g, tmp_path / "g.txt")
    g = load_edge_list(tmp_path / "g.txt")
    assert run("--out", tmp_path, "order", tmp_path / "g.txt", "--ordering", "dgl") == 0
    assert run("--out", tmp_path, "metrics", tmp_path / "g.txt", "--ordering-file", tmp_path / "g.order") == 0
    from graphlayout.metrics import colocation_ratio

    expect = colocation_ratio(apply_ordering(g, order_dgl(g, 0)))
    row = (tmp_path / "g.metrics.csv").read_text().splitlines()
    header, values = row[0].split(","), row[1].split(",")
    assert float(values[header.index("coloc")]) == expect


def test_bench_pagerank_p1_sends_nothing(tmp_path, cycle6):
    assert run("--out", tmp_path, "bench", cycle6, "--analytic", "pagerank", "--iters", 3) == 0
    lines = (tmp_path / "bench_summary.csv").read_text().splitlines()
    header, values = lines[0].split(","), lines[1].split(",")
    assert values[header.index("total_sent")] == "0"


def test_bench_figures(tmp_path, cycle6):
    assert run("--out", tmp_path, "bench", cycle6, "--parts", 2, "--analytic", "bfs", "--figures") == 0
    assert (tmp_path / "bench_timeline.png").read_bytes()[:4] == b"\x89PNG"


def test_bench_count_template(tmp_path, cycle6):
    (tmp_path / "t.txt").write_text("0 1\n")
    assert run("--out", tmp_path, "bench", cycle6, "--analytic", "count", "--template", tmp_path / "t.txt") == 0
    assert (tmp_path / "bench_result.csv").read_text().splitlines()[1].endswith(",6.0")


def test_pipeline_files_equal_in_process(tmp_path):
    g = gen.with_random_weights(gen.planted(4, 25, 0.3, 0.02, seed=2), seed=2)
    save_edge_list(g, tmp_path / "g.txt")
    g = load_edge_list(tmp_path / "g.txt")
    assert run("--out", tmp_path, "--seed", 7, "partition", tmp_path / "g.txt", "--parts", 4) in (0, 3)
    assert run("--out", tmp_path, "--seed", 7, "order", tmp_path / "g.txt", "--ordering", "dgl") == 0
    assert run("--out", tmp_path, "--seed", 7, "bench", tmp_path / "g.txt", "--partition", tmp_path / "g.part",
               "--ordering-file", tmp_path / "g.order", "--analytic", "sssp", "--root", 3) == 0
    part = partition_lp(g, PartitionConfig(4, seed=7))
    dist, _ = run_bench(g, part, order_dgl(g, 7), "sssp", root=3, seed=7)
    rows = (tmp_path / "bench_result.csv").read_text().splitlines()[1:]
    assert [float(r.split(",")[1]) for r in rows] == dist.tolist()


def test_run_bench_results_in_input_ids():
    g = gen.gnm(30, 60, seed=5)
    part = partition_lp(g, PartitionConfig(3, seed=1))
    lv, _ = run_bench(g, part, order_dgl(g, 1), "bfs", root=4)
    ref, _ = bfs(distribute(g, part), 4)
    assert np.array_equal(lv, ref)
    pr, _ = run_bench(g, part, order_dgl(g, 1), "pagerank", iters=10)
    assert np.max(np.abs(pr - pagerank(distribute(g, part), 10)[0])) <= 1e-12


COMMANDS = [
    ["generate", "planted", "--blocks", 4, "--block-size", 30, "--p-in", 0.2, "--p-out", 0.01, "--weights"],
    ["preprocess", "{g}"],
    ["partition", "{g}", "--parts", 4, "--partitioner", "lp-m"],
    ["order", "{g}", "--ordering", "dgl", "--scope", "per-part", "--parts", 4],
    ["metrics", "{g}", "--parts", 4, "--partitioner", "random", "--ordering", "rcm", "--hops", 2],
    ["bench", "{g}", "--parts", 4, "--analytic", "sssp", "--ordering", "dgl", "--figures"],
    ["bench", "{g}", "--parts", 4, "--analytic", "count", "--iters", 5],
    ["replication", "{g}", "--parts", 4, "--hops", 1, 2, 3],
]


@pytest.mark.parametrize("cmd", COMMANDS, ids=lambda c: c[0] + "-" + str(c[1]))
def test_commands_byte_deterministic(tmp_path, cmd):
    outputs = []
    for rep in range(2):
        out = tmp_path / f"run{rep}"
        assert run("--out", out, "--seed", 3, *COMMANDS[0]) == 0
        g = out / "planted.txt"
        if cmd is not COMMANDS[0]:
            assert run("--out", out, "--seed", 3, *[str(g) if a == "{g}" else a for a in cmd]) in (0, 3)
        outputs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
    assert outputs[0] == outputs[1]
