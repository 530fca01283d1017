"""Command-line driver for single runs and parameter sweeps.

Every combination of graph, p, policy, outlier flag, task model and seed is
one cell. Cells are independent and may run in parallel; each writes its own
``tasks.csv``/``ecdf.csv``/``summary.json`` and a ``manifest.json`` at the
output root lists every file with its SHA-256.
"""

from __future__ import annotations

import argparse
import hashlib
import itertools
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np

from .engine import FailureSpec, Policy, SimConfig, run_simulation
from .graph import largest_component, load_graph
from .metrics import emit_results, make_grid, summarize
from .overhead import MODES, total_control_overhead
from .workload import TaskSizeModel

log = logging.getLogger("socialcloud")

DEFAULT_PS = "0.1:0.5:0.1"
DEFAULT_TASKS = ("const:1000", "uniform:500:1500")


@dataclass
class ExperimentPlan:
    graphs: list
    ps: list = field(default_factory=lambda: parse_range(DEFAULT_PS))
    policies: list = field(default_factory=lambda: [p.value for p in Policy])
    outliers: list = field(default_factory=lambda: [True, False])
    tasks: list = field(default_factory=lambda: list(DEFAULT_TASKS))
    seeds: list = field(default_factory=lambda: [0])
    out: str = "results"
    jobs: int = 1
    theta: float = 1.0
    fail_rate: float = 0.0
    grid: tuple = (0.0, 5.0, 0.05)
    overhead: list = field(default_factory=list)
    trace: bool = False
    fmt: str = "edgelist"
    lcc: bool = False

    def cells(self) -> list:
        names = graph_names(self.graphs)
        out = []
        for (gi, path), (pi, p), policy, outlier, task, seed in itertools.product(
                enumerate(self.graphs), enumerate(self.ps), self.policies, self.outliers,
                self.tasks, self.seeds):
            out.append({
                "index": len(out),
                "graph": names[gi],
                "path": path,
                "p": p,
                "policy": policy,
                "outlier": outlier,
                "task": task,
                "seed": seed,
                "cell_seed": cell_seed(seed, gi, pi),
            })
        return out


def cell_seed(master: int, graph_index: int, p_index: int) -> int:
    """Run seed shared by every cell with the same graph and p.

    Policies, outlier handling and task models are compared on the same
    outsourcer draw.
    """
    ss = np.random.SeedSequence(master, spawn_key=(graph_index, p_index))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def graph_names(paths) -> list:
    names = []
    for path in paths:
        stem = os.path.splitext(os.path.basename(path))[0]
        name = stem
        i = 1
        while name in names:
            i += 1
            name = f"{stem}-{i}"
        names.append(name)
    return names


def parse_range(text: str) -> list:
    """``V`` or inclusive ``LO:HI:STEP``."""
    parts = text.split(":")
    try:
        nums = [float(x) for x in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r}") from None
    if len(nums) == 1:
        return nums
    if len(nums) != 3 or nums[2] <= 0 or nums[1] < nums[0]:
        raise argparse.ArgumentTypeError(f"range must be LO:HI:STEP with STEP > 0, got {text!r}")
    lo, hi, step = nums
    count = int(np.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + i * step, 10) for i in range(count)]


def parse_task(text: str) -> TaskSizeModel:
    kind, _, rest = text.partition(":")
    try:
        if kind == "const":
            return TaskSizeModel.constant(float(rest))
        if kind == "uniform":
            lo, hi = (float(x) for x in rest.split(":"))
            return TaskSizeModel.uniform(lo, hi)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad task model {text!r}: {exc}") from None
    raise argparse.ArgumentTypeError(f"task model must be const:T or uniform:LO:HI, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="socialcloud", description=__doc__.splitlines()[0])
    ap.add_argument("--config", help="JSON file with default values for any flag")
    ap.add_argument("--graph", action="append", help="edge-list file (repeatable)")
    ap.add_argument("--format", default=None, choices=["edgelist"])
    ap.add_argument("--lcc", action="store_true", default=None,
                    help="keep only the largest connected component")
    ap.add_argument("--p", help="LO:HI:STEP or a single value (default 0.1:0.5:0.1)")
    ap.add_argument("--policy", choices=["rr", "sf", "lf", "all"])
    ap.add_argument("--outliers", choices=["on", "off", "both"])
    ap.add_argument("--task", action="append", help="const:T or uniform:LO:HI (repeatable)")
    ap.add_argument("--theta", type=float, help="smallest re-split share, work units")
    ap.add_argument("--fail-rate", type=float, help="per-node failure probability")
    ap.add_argument("--seed", type=int, action="append", help="master seed (repeatable)")
    ap.add_argument("--grid", help="ECDF grid LO:HI:STEP (default 0:5:0.05)")
    ap.add_argument("--overhead", choices=["centralized", "decentralized", "both"])
    ap.add_argument("--out", help="output directory")
    ap.add_argument("--jobs", type=int, help="parallel worker processes")
    ap.add_argument("--trace", action="store_true", default=None, help="write event traces")
    return ap


def parse_config(argv=None, config_file: str | None = None) -> ExperimentPlan:
    ap = build_parser()
    args = ap.parse_args(argv)
    defaults = {}
    path = args.config or config_file
    if path:
        with open(path, encoding="utf-8") as fh:
            defaults = json.load(fh)
        unknown = set(defaults) - {a.dest for a in ap._actions}
        if unknown:
            ap.error(f"unknown config keys: {', '.join(sorted(unknown))}")

    def pick(name, fallback=None):
        val = getattr(args, name)
        return defaults.get(name, fallback) if val is None else val

    graphs = pick("graph") or []
    if isinstance(graphs, str):
        graphs = [graphs]
    if not graphs:
        ap.error("at least one --graph is required")
    for g in graphs:
        if not os.path.exists(g):
            ap.error(f"graph file not found: {g}")

    try:
        ps = parse_range(str(pick("p", DEFAULT_PS)))
        grid = parse_range(str(pick("grid", "0:5:0.05")))
        tasks = pick("task") or list(DEFAULT_TASKS)
        tasks = [tasks] if isinstance(tasks, str) else tasks
        for t in tasks:
            parse_task(t)
    except argparse.ArgumentTypeError as exc:
        ap.error(str(exc))
    if any(not 0 <= p <= 1 for p in ps):
        ap.error("p values must lie in [0, 1]")
    if len(grid) < 2:
        ap.error("grid needs LO:HI:STEP")

    policy = pick("policy", "all")
    outliers = pick("outliers", "both")
    overhead = pick("overhead")
    theta = float(pick("theta", 1.0))
    fail_rate = float(pick("fail_rate", 0.0))
    jobs = int(pick("jobs", 1))
    if theta < 0:
        ap.error("--theta must be non-negative")
    if not 0 <= fail_rate <= 1:
        ap.error("--fail-rate must lie in [0, 1]")
    if jobs < 1:
        ap.error("--jobs must be at least 1")
    seeds = pick("seed") or [0]
    seeds = [seeds] if isinstance(seeds, int) else seeds
    lo, hi = grid[0], grid[-1]
    step = round(grid[1] - grid[0], 10)

    return ExperimentPlan(
        graphs=list(graphs),
        ps=ps,
        policies=[p.value for p in Policy] if policy == "all" else [policy],
        outliers={"on": [True], "off": [False], "both": [True, False]}[outliers],
        tasks=list(tasks),
        seeds=[int(s) for s in seeds],
        out=pick("out", "results"),
        jobs=jobs,
        theta=theta,
        fail_rate=fail_rate,
        grid=(lo, hi, step),
        overhead=list(MODES) if overhead == "both" else ([overhead] if overhead else []),
        trace=bool(pick("trace", False)),
        fmt=pick("format", "edgelist"),
        lcc=bool(pick("lcc", False)),
    )


@lru_cache(maxsize=8)
def _load(path: str, fmt: str, lcc: bool, name: str):
    g = load_graph(path, format=fmt, name=name)
    return largest_component(g) if lcc else g


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def cell_dir(cell: dict) -> str:
    model = cell["task"].replace(":", "_")
    outlier = "B" if cell["outlier"] else "U"
    return os.path.join(cell["graph"],
                        f"{cell['policy']}-p{cell['p']:g}-{outlier}-{model}-s{cell['seed']}")


def run_cell(plan: ExperimentPlan, cell: dict) -> dict:
    g = _load(cell["path"], plan.fmt, plan.lcc, cell["graph"])
    model = parse_task(cell["task"])
    cfg = SimConfig(
        policy=cell["policy"],
        p=cell["p"],
        task_model=model,
        outliers=cell["outlier"],
        theta=plan.theta,
        failures=FailureSpec(plan.fail_rate) if plan.fail_rate > 0 else None,
        seed=cell["cell_seed"],
        trace=plan.trace,
    )
    result = run_simulation(g, cfg=cfg)
    summary = summarize(result, cell["graph"], seed=cell["seed"])
    summary.config["cell_seed"] = str(cell["cell_seed"])
    rel = cell_dir(cell)
    target = os.path.join(plan.out, rel)
    files = emit_results(result.outcomes, summary, target, grid=make_grid(*plan.grid))
    if plan.trace:
        trace_path = os.path.join(target, "trace.txt")
        with open(trace_path, "w", encoding="utf-8") as fh:
            fh.writelines(line + "\n" for line in result.trace)
        files.append(trace_path)
    return {
        "files": [os.path.relpath(f, plan.out) for f in files],
        "frac_x1": summary.frac_x1,
        "incomplete": summary.incomplete,
    }


def _run_cell_safe(args):
    plan, cell = args
    try:
        return run_cell(plan, cell), None
    except Exception as exc:  # reported per cell, the sweep carries on
        return None, f"{type(exc).__name__}: {exc}"


def write_overhead(plan: ExperimentPlan) -> list:
    files = []
    for path, name in zip(plan.graphs, graph_names(plan.graphs)):
        g = _load(path, plan.fmt, plan.lcc, name)
        os.makedirs(os.path.join(plan.out, name), exist_ok=True)
        target = os.path.join(plan.out, name, "overhead.csv")
        with open(target, "w", encoding="utf-8") as fh:
            fh.write("mode,sync_rounds,total_messages\n")
            for mode in plan.overhead:
                rep = total_control_overhead(g, mode)
                fh.write(f"{rep['mode']},{rep['sync_rounds']},{rep['total_messages']}\n")
        files.append(os.path.relpath(target, plan.out))
    return files


def run_plan(plan: ExperimentPlan) -> int:
    """Run every cell; returns the process exit status (1 if any cell failed)."""
    os.makedirs(plan.out, exist_ok=True)
    cells = plan.cells()
    work = [(plan, c) for c in cells]
    if plan.jobs > 1:
        with ProcessPoolExecutor(max_workers=plan.jobs) as pool:
            results = list(pool.map(_run_cell_safe, work))
    else:
        results = [_run_cell_safe(w) for w in work]

    entries = []
    failed = 0
    for cell, (res, err) in zip(cells, results):
        entry = {k: v for k, v in cell.items() if k != "path"}
        entry["status"] = "ok" if err is None else "error"
        if err is not None:
            failed += 1
            entry["error"] = err
            log.error("cell %d (%s) failed: %s", cell["index"], cell_dir(cell), err)
        else:
            entry["files"] = [{"path": f, "sha256": _sha256(os.path.join(plan.out, f))}
                              for f in res["files"]]
        entries.append(entry)

    extra = []
    if plan.overhead:
        extra = [{"path": f, "sha256": _sha256(os.path.join(plan.out, f))}
                 for f in write_overhead(plan)]

    plan_echo = asdict(plan)
    plan_echo.pop("jobs")
    plan_echo.pop("out")
    manifest = {"plan": plan_echo, "cells": entries, "overhead": extra, "failed": failed}
    with open(os.path.join(plan.out, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    log.info("%d cell(s), %d failed; manifest at %s", len(cells), failed,
             os.path.join(plan.out, "manifest.json"))
    return 1 if failed else 0


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    plan = parse_config(argv)
    return run_plan(plan)


if __name__ == "__main__":
    sys.exit(main())
