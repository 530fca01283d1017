"""Outsourcer sampling, task sizes, and equal splitting across 1-hop neighbours.

All work quantities are integers in micro-units: one virtual work unit
(one unit of time on a dedicated unit-speed machine) is ``SCALE`` micro-units.
Random streams come from numpy's ``PCG64`` bit generator; a run seed is
expanded with ``numpy.random.SeedSequence`` into independent child streams
for outsourcer selection, task sizes and failures, so changing the task model
never changes which nodes outsource.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .graph import Graph

log = logging.getLogger(__name__)

SCALE = 10**6

STREAM_OUTSOURCERS = 0
STREAM_SIZES = 1
STREAM_FAILURES = 2


def to_micro(units: float) -> int:
    return int(round(units * SCALE))


def to_units(micro: int) -> float:
    return micro / SCALE


def make_rng(seed: int, stream: int) -> np.random.Generator:
    """PCG64 generator for one named child stream of ``seed``."""
    ss = np.random.SeedSequence(seed, spawn_key=(stream,))
    return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True)
class TaskSizeModel:
    kind: str = "constant"
    mean: float = 1000.0
    half_width: float = 0.0

    def __post_init__(self):
        if self.kind not in ("constant", "uniform"):
            raise ValueError(f"unknown task model kind {self.kind!r}")
        if self.mean <= 0:
            raise ValueError("mean task size must be positive")
        if self.kind == "uniform" and not (0 <= self.half_width < self.mean):
            raise ValueError("uniform task model needs mean > half_width >= 0")

    @classmethod
    def constant(cls, size: float) -> "TaskSizeModel":
        return cls("constant", float(size))

    @classmethod
    def uniform(cls, lo: float, hi: float) -> "TaskSizeModel":
        if hi < lo:
            raise ValueError("uniform task model needs lo <= hi")
        return cls("uniform", (lo + hi) / 2, (hi - lo) / 2)

    @property
    def label(self) -> str:
        if self.kind == "constant":
            return f"const:{self.mean:g}"
        return f"uniform:{self.mean - self.half_width:g}:{self.mean + self.half_width:g}"


@dataclass(frozen=True)
class TaskSpec:
    task_id: int
    outsourcer: int
    size: int  # micro-units
    created: int = 0


@dataclass
class Subtask:
    task_id: int
    worker: int
    assigned: int
    remaining: int
    generation: int = 0
    seq: int = 0


@dataclass(frozen=True)
class Sample:
    outsourcers: list
    skipped_isolated: int


def sample_outsourcers(g: Graph, p: float, rng: np.random.Generator) -> Sample:
    """Independent Bernoulli(p) draw per node, in node-id order.

    One uniform is consumed for every node, including isolated ones, so the
    stream stays aligned with node ids; isolated nodes are then dropped.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    draws = rng.random(g.node_count)
    chosen = draws < p
    isolated = g.degrees() == 0
    skipped = int((chosen & isolated).sum())
    if skipped:
        log.warning("%d isolated node(s) drew a task but have no workers; skipped", skipped)
    return Sample(np.flatnonzero(chosen & ~isolated).tolist(), skipped)


def generate_task_size(model: TaskSizeModel, rng: np.random.Generator) -> int:
    if model.kind == "constant" or model.half_width == 0:
        return to_micro(model.mean)
    lo = to_micro(model.mean - model.half_width)
    hi = to_micro(model.mean + model.half_width)
    return int(rng.integers(lo, hi, endpoint=True))


def make_tasks(g: Graph, p: float, model: TaskSizeModel, seed: int) -> tuple[list[TaskSpec], int]:
    """Outsourcers and their task sizes for one run; task ids follow node order."""
    sample = sample_outsourcers(g, p, make_rng(seed, STREAM_OUTSOURCERS))
    size_rng = make_rng(seed, STREAM_SIZES)
    tasks = [
        TaskSpec(task_id=i, outsourcer=u, size=generate_task_size(model, size_rng))
        for i, u in enumerate(sample.outsourcers)
    ]
    return tasks, sample.skipped_isolated


def equal_shares(total: int, parts: int) -> list[int]:
    """Split ``total`` into ``parts`` integers that sum to it exactly.

    The residue ``total % parts`` is absorbed by the trailing shares, one
    micro-unit each, so no two shares differ by more than one micro-unit.
    """
    base, residue = divmod(total, parts)
    return [base] * (parts - residue) + [base + 1] * residue


def split_task(task: TaskSpec, g: Graph) -> list[Subtask]:
    workers = g.neighbors(task.outsourcer).tolist()
    if not workers:
        raise ValueError(f"outsourcer {task.outsourcer} has no neighbours to outsource to")
    return [
        Subtask(task.task_id, w, share, share)
        for w, share in zip(workers, equal_shares(task.size, len(workers)))
    ]
