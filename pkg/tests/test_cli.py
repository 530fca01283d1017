import json
import os

import pytest

from socialcloud.cli import ExperimentPlan, cell_seed, main, parse_config, parse_range, run_plan


@pytest.fixture
def graph_file(tmp_path):
    path = tmp_path / "toy.txt"
    path.write_text("# toy\n0 1\n0 2\n0 3\n1 2\n3 4\n4 5\n5 0\n2 6\n6 7\n7 3\n")
    return str(path)


def test_single_run_plan(graph_file):
    plan = parse_config(["--graph", graph_file, "--p", "0.1", "--policy", "rr",
                         "--task", "const:1000", "--seed", "7"])
    cells = plan.cells()
    assert len(cells) == 2  # outlier handling on and off
    assert {c["policy"] for c in cells} == {"rr"} and {c["seed"] for c in cells} == {7}


def test_p_range_and_task_model(graph_file):
    plan = parse_config(["--graph", graph_file, "--p", "0.1:0.5:0.1",
                         "--task", "uniform:500:1500"])
    assert plan.ps == [0.1, 0.2, 0.3, 0.4, 0.5]
    assert plan.tasks == ["uniform:500:1500"]
    assert len(plan.cells()) == 30


@pytest.mark.parametrize("argv", [
    ["--p", "0.5:0.1:0.1"],
    ["--p", "1.5"],
    ["--task", "normal:3"],
    ["--policy", "fifo"],
    ["--bogus"],
    ["--jobs", "0"],
])
def test_invalid_arguments(graph_file, argv):
    with pytest.raises(SystemExit) as exc:
        parse_config(["--graph", graph_file] + argv)
    assert exc.value.code == 2


def test_missing_graph(tmp_path):
    with pytest.raises(SystemExit):
        parse_config(["--graph", str(tmp_path / "nope.txt")])


def test_config_file(graph_file, tmp_path):
    cfg = tmp_path / "plan.json"
    cfg.write_text(json.dumps({"graph": [graph_file], "p": "0.2", "policy": "sf", "seed": [1, 2]}))
    plan = parse_config(["--config", str(cfg), "--policy", "lf"])
    assert plan.ps == [0.2] and plan.policies == ["lf"] and plan.seeds == [1, 2]


def test_parse_range():
    assert parse_range("0.3") == [0.3]
    assert parse_range("0:1:0.25") == [0.0, 0.25, 0.5, 0.75, 1.0]


def test_cell_seed_shared_across_policy_axes(graph_file):
    plan = ExperimentPlan(graphs=[graph_file], ps=[0.1, 0.2], tasks=["const:1000"])
    by_p = {}
    for c in plan.cells():
        by_p.setdefault(c["p"], set()).add(c["cell_seed"])
    assert all(len(s) == 1 for s in by_p.values())
    assert by_p[0.1] != by_p[0.2]
    assert cell_seed(0, 0, 0) != cell_seed(1, 0, 0)


def read_tree(root):
    out = {}
    for dirpath, _, files in os.walk(root):
        for f in files:
            path = os.path.join(dirpath, f)
            out[os.path.relpath(path, root)] = open(path, "rb").read()
    return out


def test_serial_and_parallel_runs_identical(graph_file, tmp_path):
    base = ["--graph", graph_file, "--p", "0.3:0.5:0.2", "--overhead", "both", "--trace"]
    assert main(base + ["--out", str(tmp_path / "a")]) == 0
    assert main(base + ["--out", str(tmp_path / "b"), "--jobs", "3"]) == 0
    a, b = read_tree(tmp_path / "a"), read_tree(tmp_path / "b")
    assert a == b

    manifest = json.loads(a["manifest.json"])
    assert len(manifest["cells"]) == 2 * 3 * 2 * 2
    listed = {f["path"] for c in manifest["cells"] for f in c["files"]}
    listed |= {f["path"] for f in manifest["overhead"]}
    assert listed == set(a) - {"manifest.json"}
    overhead = a[os.path.join("toy", "overhead.csv")].decode().splitlines()
    assert overhead[0] == "mode,sync_rounds,total_messages"
    assert [row.split(",")[0] for row in overhead[1:]] == ["centralized", "decentralized"]


def test_failing_cell_is_isolated(graph_file, tmp_path):
    plan = ExperimentPlan(graphs=[graph_file], ps=[0.5], policies=["rr"], outliers=[True],
                          tasks=["const:1000", "const:-5"], out=str(tmp_path))
    assert run_plan(plan) == 1
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert [c["status"] for c in manifest["cells"]] == ["ok", "error"]
    assert manifest["failed"] == 1
    assert (tmp_path / "toy" / "rr-p0.5-B-const_1000-s0" / "tasks.csv").exists()
