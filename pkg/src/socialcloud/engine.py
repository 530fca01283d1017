"""Event-driven virtual-time execution of outsourced subtasks.

Workers run their subtasks under one of three local policies:

* ``RR``: fluid processor sharing, every active subtask advances at ``1/k``.
* ``SF``: one subtask at a time, smallest assigned share first.
* ``LF``: one subtask at a time, largest assigned share first.

Time and work are integers in micro-units (see :mod:`socialcloud.workload`).
Under RR a worker's state is only rebased at events touching that worker;
when a rebase falls between two completions the per-subtask service is
rounded down to a whole micro-unit, so the worker idles for less than ``k``
micro-units of time. Work bookkeeping stays exact either way.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .graph import Graph
from .overhead import overhead_report
from .workload import (
    SCALE,
    STREAM_FAILURES,
    Subtask,
    TaskSizeModel,
    TaskSpec,
    equal_shares,
    make_rng,
    make_tasks,
    split_task,
    to_micro,
)

COMPLETION = 0
FAILURE = 1


class Policy(str, Enum):
    RR = "rr"
    SF = "sf"
    LF = "lf"


@dataclass(frozen=True)
class FailureSpec:
    """Each node fails with probability ``rate`` at a time ~ U(0, horizon).

    ``horizon`` is in work units; ``None`` means the mean task size.
    """

    rate: float
    horizon: float | None = None

    def __post_init__(self):
        if not 0.0 <= self.rate <= 1.0:
            raise ValueError("failure rate must lie in [0, 1]")
        if self.horizon is not None and self.horizon <= 0:
            raise ValueError("failure horizon must be positive")


@dataclass(frozen=True)
class SimConfig:
    policy: Policy = Policy.RR
    p: float = 0.1
    task_model: TaskSizeModel = field(default_factory=TaskSizeModel)
    outliers: bool = True
    theta: float = 1.0
    failures: FailureSpec | None = None
    seed: int = 0
    overhead_mode: str = "centralized"
    trigger: str = "all"
    tie_window: float = 1e-3
    trace: bool = False

    def __post_init__(self):
        object.__setattr__(self, "policy", Policy(self.policy))
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        if self.tie_window < 0:
            raise ValueError("tie window must be non-negative")
        if self.theta < 0:
            raise ValueError("theta must be non-negative")
        if self.trigger not in ("all", "any"):
            raise ValueError("trigger must be 'all' or 'any'")
        if self.overhead_mode not in ("centralized", "decentralized"):
            raise ValueError("overhead mode must be centralized or decentralized")


@dataclass(frozen=True)
class TaskOutcome:
    task_id: int
    outsourcer: int
    degree: int
    t_tot: int
    t_last: int | None
    resplits: int
    executed: int
    completed: bool

    @property
    def x(self) -> float | None:
        if not self.completed:
            return None
        return self.t_last / self.t_tot


@dataclass
class SimResult:
    outcomes: list
    trace: list
    overhead: dict
    config: SimConfig
    skipped_isolated: int = 0
    events: int = 0


# ---------------------------------------------------------------- workers


class RoundRobinWorker:
    """Fluid processor sharing over the active subtasks.

    Each subtask carries a finish tag ``V_at_entry + remaining`` where ``V``
    is the cumulative service every active subtask has received; the
    smallest tag completes first.
    """

    def __init__(self, wid: int, now: int = 0):
        self.wid = wid
        self.t = now
        self.service = 0
        self.heap = []
        self.tags = {}

    @property
    def k(self) -> int:
        return len(self.tags)

    def advance(self, now: int) -> None:
        if self.tags:
            self.service += (now - self.t) // len(self.tags)
        self.t = now

    def add(self, sub: Subtask, now: int) -> None:
        self.advance(now)
        tag = self.service + sub.remaining
        self.tags[sub.seq] = (tag, sub)
        heapq.heappush(self.heap, (tag, sub.task_id, sub.seq, sub))

    def remaining_of(self, sub: Subtask, now: int) -> int:
        tag, _ = self.tags[sub.seq]
        return max(tag - self.service - (now - self.t) // len(self.tags), 0)

    def remove(self, sub: Subtask, now: int) -> int:
        self.advance(now)
        tag, _ = self.tags.pop(sub.seq)
        sub.remaining = max(tag - self.service, 0)
        return sub.remaining

    def _top(self):
        heap = self.heap
        while heap and heap[0][2] not in self.tags:
            heapq.heappop(heap)
        return heap[0] if heap else None

    def next_completion(self):
        top = self._top()
        if top is None:
            return None
        tag, _, _, sub = top
        return self.t + len(self.tags) * (tag - self.service), sub

    def complete(self, now: int) -> list:
        self.advance(now)
        done = []
        while True:
            top = self._top()
            if top is None or top[0] > self.service:
                break
            heapq.heappop(self.heap)
            sub = top[3]
            del self.tags[sub.seq]
            sub.remaining = 0
            done.append(sub)
        return done

    def active(self) -> list:
        return sorted((s for _, s in self.tags.values()), key=lambda s: (s.task_id, s.seq))


class SerialWorker:
    """Runs the head of a size-ordered queue at rate 1.

    The order key is the assigned share at enqueue time, ties broken by
    outsourcer id then task id. A newcomer preempts the running subtask only
    if its share is strictly better, unless the running one has not yet
    received any service.
    """

    def __init__(self, wid: int, longest_first: bool, outsourcer_of, now: int = 0):
        self.wid = wid
        self.sign = -1 if longest_first else 1
        self.outsourcer_of = outsourcer_of
        self.queue = []
        self.waiting = {}
        self.running = None
        self.started = now

    def _key(self, sub: Subtask):
        return (self.sign * sub.assigned, self.outsourcer_of[sub.task_id], sub.task_id, sub.seq)

    @property
    def k(self) -> int:
        return len(self.waiting) + (self.running is not None)

    def _dispatch(self, now: int) -> None:
        while self.running is None and self.queue:
            _, sub = heapq.heappop(self.queue)
            if self.waiting.pop(sub.seq, None) is not None:
                self.running = sub
                self.started = now

    def _park_running(self, now: int) -> None:
        sub = self.running
        sub.remaining -= now - self.started
        self.running = None
        self.waiting[sub.seq] = sub
        heapq.heappush(self.queue, (self._key(sub), sub))

    def add(self, sub: Subtask, now: int) -> None:
        cur = self.running
        if cur is not None:
            fresh = now == self.started
            better = self._key(sub) < self._key(cur) if fresh else (
                self.sign * sub.assigned < self.sign * cur.assigned)
            if better:
                self._park_running(now)
        self.waiting[sub.seq] = sub
        heapq.heappush(self.queue, (self._key(sub), sub))
        self._dispatch(now)

    def remaining_of(self, sub: Subtask, now: int) -> int:
        if sub is self.running:
            return sub.remaining - (now - self.started)
        return sub.remaining

    def remove(self, sub: Subtask, now: int) -> int:
        if sub is self.running:
            sub.remaining -= now - self.started
            self.running = None
            self._dispatch(now)
        else:
            del self.waiting[sub.seq]
        return sub.remaining

    def next_completion(self):
        if self.running is None:
            return None
        return self.started + self.running.remaining, self.running

    def complete(self, now: int) -> list:
        sub = self.running
        sub.remaining = 0
        self.running = None
        self._dispatch(now)
        return [sub]

    def active(self) -> list:
        subs = list(self.waiting.values())
        if self.running is not None:
            subs.append(self.running)
        return sorted(subs, key=lambda s: (s.task_id, s.seq))


def advance_rr(worker: RoundRobinWorker, now: int):
    """Bring a processor-sharing worker to ``now``; return its next completion."""
    worker.advance(now)
    return worker.next_completion()


def advance_serial(worker: SerialWorker, now: int):
    """Return the running subtask's completion ``(time, subtask)``.

    A serial worker's state is already a closed form in ``now``.
    """
    worker._dispatch(now)
    return worker.next_completion()


# ---------------------------------------------------------------- simulation


class _TaskState:
    __slots__ = ("spec", "degree", "open", "done", "executed", "resplits", "parked", "t_last")

    def __init__(self, spec: TaskSpec, degree: int):
        self.spec = spec
        self.degree = degree
        self.open = {}
        self.done = 0
        self.executed = 0
        self.resplits = 0
        self.parked = []
        self.t_last = None


@dataclass(frozen=True)
class Trigger:
    task_id: int
    straggler: int
    subtask: Subtask
    idle: tuple


def _fmt_time(micro: int) -> str:
    sign = "-" if micro < 0 else ""
    micro = abs(micro)
    return f"{sign}{micro // SCALE}.{micro % SCALE:06d}"


class Simulation:
    """One batch run: every task exists at time 0 and is split at once."""

    def __init__(self, g: Graph, tasks: list, cfg: SimConfig, splits: dict | None = None,
                 failures: dict | None = None):
        self.g = g
        self.cfg = cfg
        self.adj = g.adjacency_lists()
        self.theta = to_micro(cfg.theta)
        self.window = to_micro(cfg.tie_window)
        self.tasks = {}
        self.outsourcer_of = {}
        self.workers = {}
        self.alive = [True] * g.node_count
        self.load = [0] * g.node_count
        self.events = []
        self.versions = {}
        self.trace = []
        self.now = 0
        self.seq = 0
        self.event_count = 0
        self._tasks_of_outsourcer = {}
        self._fed = []

        for spec in tasks:
            deg = len(self.adj[spec.outsourcer])
            if spec.size <= 0:
                raise ValueError(f"task {spec.task_id} has non-positive size")
            self.tasks[spec.task_id] = _TaskState(spec, deg)
            self.outsourcer_of[spec.task_id] = spec.outsourcer
            self._tasks_of_outsourcer.setdefault(spec.outsourcer, []).append(spec.task_id)

        for spec in tasks:
            subs = splits[spec.task_id] if splits is not None else split_task(spec, g)
            self._check_split(spec, subs)
            for sub in subs:
                self._assign(sub, 0)

        for wid, t_fail in sorted((failures or {}).items()):
            heapq.heappush(self.events, (t_fail, FAILURE, wid, -1, 0))

    def _check_split(self, spec: TaskSpec, subs: list) -> None:
        nbrs = set(self.adj[spec.outsourcer])
        if not subs:
            raise ValueError(f"task {spec.task_id} has no subtasks")
        if sum(s.assigned for s in subs) != spec.size:
            raise ValueError(f"task {spec.task_id}: shares do not sum to the task size")
        for s in subs:
            if s.task_id != spec.task_id or s.worker not in nbrs:
                raise ValueError(f"task {spec.task_id}: subtask on non-neighbour {s.worker}")
            if not 0 <= s.remaining <= s.assigned:
                raise ValueError(f"task {spec.task_id}: inconsistent subtask work")

    # -- worker plumbing

    def _worker(self, wid: int):
        w = self.workers.get(wid)
        if w is None:
            if self.cfg.policy is Policy.RR:
                w = RoundRobinWorker(wid, self.now)
            else:
                w = SerialWorker(wid, self.cfg.policy is Policy.LF, self.outsourcer_of, self.now)
            self.workers[wid] = w
        return w

    def _schedule(self, wid: int) -> None:
        ver = self.versions.get(wid, 0) + 1
        self.versions[wid] = ver
        nxt = self.workers[wid].next_completion()
        if nxt is not None:
            t, sub = nxt
            heapq.heappush(self.events, (t, COMPLETION, wid, sub.task_id, ver))

    def _assign(self, sub: Subtask, now: int) -> None:
        self.seq += 1
        sub.seq = self.seq
        self.tasks[sub.task_id].open[sub.seq] = sub
        self.load[sub.worker] += 1
        self._worker(sub.worker).add(sub, now)
        self._schedule(sub.worker)
        if now > 0:
            self._fed.append(sub.worker)
            if self.cfg.trace:
                self._log(now, "assign", sub.worker, sub.task_id, sub.remaining)

    def _log(self, t, kind, worker, task, remaining) -> None:
        self.trace.append(f"{_fmt_time(t)} {kind} {worker} {task} {_fmt_time(remaining)}")

    def is_idle(self, v: int) -> bool:
        return self.load[v] == 0 and self.alive[v]

    def idle_neighbors(self, u: int, exclude: int = -1) -> list:
        load, alive = self.load, self.alive
        return [v for v in self.adj[u] if not load[v] and alive[v] and v != exclude]

    # -- task bookkeeping

    def _close(self, sub: Subtask, remaining: int) -> None:
        ts = self.tasks[sub.task_id]
        del ts.open[sub.seq]
        ts.executed += sub.assigned - remaining

    def _finish_if_done(self, ts: _TaskState, now: int) -> None:
        if not ts.open and not ts.parked and ts.t_last is None:
            ts.t_last = now

    def _redistribute(self, task_id: int, remaining: int, generation: int, nodes: list,
                      now: int) -> None:
        nodes = nodes[:remaining] if remaining < len(nodes) else nodes
        for v, share in zip(nodes, equal_shares(remaining, len(nodes))):
            self._assign(Subtask(task_id, v, share, share, generation), now)

    # -- straggler handling

    def detect_outliers(self, candidates, now: int) -> list:
        """Straggler triggers among ``candidates`` (task ids) at ``now``."""
        triggers = []
        for tid in sorted(candidates):
            ts = self.tasks[tid]
            if ts.t_last is not None or not ts.open:
                continue
            if self.cfg.trigger == "all":
                if len(ts.open) != 1:
                    continue
                stragglers = list(ts.open.values())
            else:
                if ts.done == 0:
                    continue
                stragglers = sorted(ts.open.values(), key=lambda s: (s.worker, s.seq))
            u = ts.spec.outsourcer
            for sub in stragglers:
                idle = self.idle_neighbors(u, exclude=sub.worker)
                if idle:
                    triggers.append(Trigger(tid, sub.worker, sub, tuple(idle)))
        return triggers

    def reoutsource(self, trigger: Trigger, now: int) -> list:
        """Move a straggler's remaining work onto idle neighbours of the outsourcer.

        Idle sets are re-evaluated here since an earlier trigger at the same
        instant may have consumed some of them.
        """
        ts = self.tasks[trigger.task_id]
        sub = trigger.subtask
        if sub.seq not in ts.open:
            return []
        idle = self.idle_neighbors(ts.spec.outsourcer, exclude=sub.worker)
        if not idle:
            return []
        worker = self.workers[sub.worker]
        if worker.k < 2 and len(idle) < 2:
            # moving a lone subtask to one other idle node cannot finish it sooner
            return []
        rem = worker.remaining_of(sub, now)
        if rem <= 0 or rem < self.theta * len(idle):
            return []
        rem = worker.remove(sub, now)
        self.load[sub.worker] -= 1
        self._schedule(sub.worker)
        self._close(sub, rem)
        ts.resplits += 1
        if self.cfg.trace:
            self._log(now, "resplit", sub.worker, sub.task_id, rem)
        before = self.seq
        self._redistribute(sub.task_id, rem, sub.generation + 1, idle, now)
        return [s for s in ts.open.values() if s.seq > before]

    # -- failures

    def inject_failure(self, wid: int, now: int) -> list:
        """Kill ``wid``: its active subtasks are pulled and queued for redistribution."""
        self.alive[wid] = False
        if self.cfg.trace:
            self._log(now, "fail", wid, -1, 0)
        w = self.workers.get(wid)
        if w is None or w.k == 0:
            return []
        pulled = []
        for sub in w.active():
            rem = w.remove(sub, now)
            self.load[wid] -= 1
            self._close(sub, rem)
            ts = self.tasks[sub.task_id]
            if rem > 0:
                ts.parked.append((rem, sub.generation + 1))
                pulled.append(sub.task_id)
            else:
                self._finish_if_done(ts, now)
        self.versions[wid] = self.versions.get(wid, 0) + 1
        return pulled

    def _retry_parked(self, task_ids, now: int) -> None:
        for tid in sorted(task_ids):
            ts = self.tasks[tid]
            still = []
            for rem, gen in ts.parked:
                idle = self.idle_neighbors(ts.spec.outsourcer)
                if idle:
                    self._redistribute(tid, rem, gen, idle, now)
                else:
                    if self.cfg.trace:
                        self._log(now, "park", -1, tid, rem)
                    still.append((rem, gen))
            ts.parked = still

    # -- main loop

    def run(self) -> SimResult:
        events = self.events
        parked_tasks = set()
        while events:
            horizon = events[0][0] + self.window
            touched = set()
            freed = []
            now = None
            # events closer together than the window form one batch; idleness
            # is judged once the whole batch has been applied
            while events and events[0][0] <= horizon:
                t, kind, wid, _, ver = heapq.heappop(events)
                if kind == COMPLETION and (self.versions.get(wid) != ver or not self.alive[wid]):
                    continue
                now = self.now = t
                if kind == COMPLETION:
                    self.event_count += 1
                    w = self.workers[wid]
                    for sub in w.complete(now):
                        self.load[wid] -= 1
                        self._close(sub, 0)
                        ts = self.tasks[sub.task_id]
                        ts.done += 1
                        touched.add(sub.task_id)
                        if self.cfg.trace:
                            self._log(now, "complete", wid, sub.task_id, 0)
                        self._finish_if_done(ts, now)
                    self._schedule(wid)
                    if not self.load[wid]:
                        freed.append(wid)
                else:
                    self.event_count += 1
                    parked_tasks.update(self.inject_failure(wid, now))
            if now is None:
                continue

            if parked_tasks:
                self._retry_parked(parked_tasks, now)
                parked_tasks = {tid for tid in parked_tasks if self.tasks[tid].parked}
                for tid in list(touched):
                    self._finish_if_done(self.tasks[tid], now)

            if self.cfg.outliers:
                self._handle_outliers(touched, freed, now)
            self._fed = []

        return self._result()

    def _handle_outliers(self, touched: set, freed: list, now: int) -> None:
        # A task's eligibility changes when its subtasks finish, when a
        # neighbour of its outsourcer turns idle, or when one is handed work
        # (a smaller idle set can clear the quantum guard). Re-splits cause
        # the latter two, so iterate until nothing fires.
        candidates = set(touched)
        changed = freed + self._fed
        while True:
            self._fed = []
            for v in changed:
                for u in self.adj[v]:
                    tids = self._tasks_of_outsourcer.get(u)
                    if tids:
                        candidates.update(tids)
            changed = []
            fired = False
            for trig in self.detect_outliers(candidates, now):
                if self.reoutsource(trig, now):
                    fired = True
                    if not self.load[trig.straggler]:
                        changed.append(trig.straggler)
            if not fired:
                return
            changed += self._fed

    def _result(self) -> SimResult:
        outcomes = []
        for tid in sorted(self.tasks):
            ts = self.tasks[tid]
            outcomes.append(TaskOutcome(
                task_id=tid,
                outsourcer=ts.spec.outsourcer,
                degree=ts.degree,
                t_tot=ts.spec.size,
                t_last=ts.t_last,
                resplits=ts.resplits,
                executed=ts.executed,
                completed=ts.t_last is not None,
            ))
        groups = [self.tasks[t].degree for t in sorted(self.tasks)]
        return SimResult(
            outcomes=outcomes,
            trace=self.trace,
            overhead=overhead_report(self.cfg.overhead_mode, groups),
            config=self.cfg,
            events=self.event_count,
        )


def draw_failures(g: Graph, cfg: SimConfig) -> dict:
    """Failure time (micro-units) per failing node, from the run's failure stream."""
    if cfg.failures is None or cfg.failures.rate == 0:
        return {}
    rng = make_rng(cfg.seed, STREAM_FAILURES)
    n = g.node_count
    fails = rng.random(n) < cfg.failures.rate
    horizon = cfg.failures.horizon or cfg.task_model.mean
    times = rng.integers(0, to_micro(horizon), size=n, endpoint=True)
    return {int(v): int(times[v]) for v in np.flatnonzero(fails)}


def run_simulation(g: Graph, tasks: list | None = None, cfg: SimConfig | None = None,
                   splits: dict | None = None) -> SimResult:
    """Run one configuration on ``g``.

    With ``tasks=None`` the outsourcers and sizes are drawn from ``cfg.seed``.
    """
    cfg = cfg or SimConfig()
    skipped = 0
    if tasks is None:
        tasks, skipped = make_tasks(g, cfg.p, cfg.task_model, cfg.seed)
    sim = Simulation(g, tasks, cfg, splits=splits, failures=draw_failures(g, cfg))
    result = sim.run()
    result.skipped_isolated = skipped
    return result
