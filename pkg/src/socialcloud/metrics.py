"""Normalised finishing times, empirical CDFs, and CSV/JSON result files."""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .workload import SCALE

TASK_COLUMNS = ["graph", "policy", "p", "outlier", "task_model", "seed", "task_id",
                "outsourcer", "degree", "t_tot", "t_last", "x", "resplits"]
ECDF_COLUMNS = ["graph", "policy", "p", "outlier", "task_model", "seed", "grid_x", "fraction"]

DENOMINATOR_NOTE = "completed tasks only; incomplete tasks are counted separately"


def normalized_time(outcome) -> float:
    if not outcome.completed:
        raise ValueError(f"task {outcome.task_id} did not complete")
    if outcome.t_tot <= 0:
        raise ValueError("task size must be positive")
    return outcome.t_last / outcome.t_tot


def make_grid(lo: float = 0.0, hi: float = 5.0, step: float = 0.05) -> np.ndarray:
    if step <= 0 or hi < lo:
        raise ValueError("grid needs step > 0 and hi >= lo")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return np.round(lo + step * np.arange(count), 10)


DEFAULT_GRID = make_grid()


@dataclass
class EcdfSeries:
    grid: np.ndarray
    fractions: np.ndarray
    count: int
    defined: bool = True

    def at(self, x: float) -> float:
        i = int(np.searchsorted(self.grid, x, side="right")) - 1
        if i < 0:
            return 0.0
        return float(self.fractions[i])


def ecdf(xs, grid=None) -> EcdfSeries:
    """Fraction of ``xs`` at or below each grid point."""
    grid = DEFAULT_GRID if grid is None else np.asarray(grid, dtype=float)
    if np.any(np.diff(grid) < 0):
        raise ValueError("grid must be ascending")
    xs = np.sort(np.asarray(xs, dtype=float))
    if xs.size == 0:
        return EcdfSeries(grid, np.full(len(grid), np.nan), 0, defined=False)
    counts = np.searchsorted(xs, grid, side="right")
    return EcdfSeries(grid, counts / xs.size, int(xs.size))


def fraction_within(xs, x: float) -> float:
    xs = np.asarray(xs, dtype=float)
    if xs.size == 0:
        return float("nan")
    return float(np.count_nonzero(xs <= x) / xs.size)


@dataclass
class RunSummary:
    config: dict
    tasks: int
    completed: int
    incomplete: int
    frac_x1: float
    frac_x2: float
    mean_x: float
    median_x: float
    resplits: int
    skipped_isolated: int = 0
    overhead: dict = field(default_factory=dict)
    denominator: str = DENOMINATOR_NOTE


def config_echo(cfg, graph_name: str, seed=None) -> dict:
    return {
        "graph": graph_name,
        "policy": cfg.policy.value.upper(),
        "p": f"{cfg.p:g}",
        "outlier": "on" if cfg.outliers else "off",
        "task_model": cfg.task_model.label,
        "seed": str(cfg.seed if seed is None else seed),
    }


def summarize(result, graph_name: str, seed=None) -> RunSummary:
    xs = [o.x for o in result.outcomes if o.completed]
    done = len(xs)
    return RunSummary(
        config=config_echo(result.config, graph_name, seed),
        tasks=len(result.outcomes),
        completed=done,
        incomplete=len(result.outcomes) - done,
        frac_x1=fraction_within(xs, 1.0),
        frac_x2=fraction_within(xs, 2.0),
        mean_x=float(np.mean(xs)) if xs else float("nan"),
        median_x=float(np.median(xs)) if xs else float("nan"),
        resplits=sum(o.resplits for o in result.outcomes),
        skipped_isolated=result.skipped_isolated,
        overhead=dict(result.overhead),
    )


def _units(micro) -> str:
    if micro is None:
        return ""
    return f"{micro // SCALE}.{micro % SCALE:06d}"


def _num(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return repr(float(x))


def task_rows(outcomes, echo: dict):
    for o in outcomes:
        yield [echo[c] for c in TASK_COLUMNS[:6]] + [
            o.task_id, o.outsourcer, o.degree, _units(o.t_tot), _units(o.t_last),
            _num(o.x), o.resplits,
        ]


def ecdf_rows(series: EcdfSeries, echo: dict):
    head = [echo[c] for c in ECDF_COLUMNS[:6]]
    for g, f in zip(series.grid, series.fractions):
        yield head + [f"{g:g}", _num(f)]


def emit_results(outcomes, summary: RunSummary, path, grid=None) -> list[str]:
    """Write ``tasks.csv``, ``ecdf.csv`` and ``summary.json`` under ``path``.

    Output is a pure function of the inputs, so reruns are byte-identical.
    """
    os.makedirs(path, exist_ok=True)
    echo = summary.config
    xs = [o.x for o in outcomes if o.completed]
    series = ecdf(xs, grid)
    files = []

    tasks_path = os.path.join(path, "tasks.csv")
    with open(tasks_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TASK_COLUMNS)
        w.writerows(task_rows(outcomes, echo))
    files.append(tasks_path)

    ecdf_path = os.path.join(path, "ecdf.csv")
    with open(ecdf_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(ECDF_COLUMNS)
        if series.defined:
            w.writerows(ecdf_rows(series, echo))
    files.append(ecdf_path)

    summary_path = os.path.join(path, "summary.json")
    payload = {k: (None if isinstance(v, float) and math.isnan(v) else v)
               for k, v in summary.__dict__.items()}
    with open(summary_path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    files.append(summary_path)
    return files
