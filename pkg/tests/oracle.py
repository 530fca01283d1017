"""Fixed-step reference simulator used to cross-check the event-driven engine.

Time advances on a grid of ``dt`` work units. In each step every busy worker
hands out ``dt`` of service according to its policy; subtasks whose
remaining work falls to ~0 finish at the end of that step. Straggler
handling is evaluated after any step with a completion by scanning every
unfinished task until nothing more fires.

Between completions the per-step service is constant, so runs of identical
steps are applied as one block. The result is the same grid simulation, just
without paying for each step in Python.
"""

from __future__ import annotations

import math

EPS = 1e-9


class _Sub:
    __slots__ = ("task", "worker", "assigned", "rem", "seq")

    def __init__(self, task, worker, assigned, seq):
        self.task = task
        self.worker = worker
        self.assigned = assigned
        self.rem = assigned
        self.seq = seq


def fixed_step(adj, tasks, policy="rr", outliers=True, theta=1.0, dt=1e-3, max_steps=10**9):
    """Simulate ``tasks`` = [(task_id, outsourcer, size_units)] on adjacency ``adj``.

    Returns ``{task_id: finish_time_units}``.
    """
    owner = {tid: u for tid, u, _ in tasks}
    subs = []
    seq = 0
    for tid, u, size in sorted(tasks):
        nbrs = sorted(adj[u])
        for v in nbrs:
            seq += 1
            subs.append(_Sub(tid, v, size / len(nbrs), seq))
    finish = {}
    step = 0

    def by_worker():
        out = {}
        for s in subs:
            out.setdefault(s.worker, []).append(s)
        return out

    def rates(groups):
        r = {}
        for w, group in groups.items():
            if policy == "rr":
                for s in group:
                    r[s.seq] = 1.0 / len(group)
            else:
                sign = -1 if policy == "lf" else 1
                head = min(group, key=lambda s: (sign * s.assigned, owner[s.task], s.task, s.seq))
                r[head.seq] = 1.0
        return r

    while subs and step < max_steps:
        groups = by_worker()
        rate = rates(groups)
        running = [s for s in subs if s.seq in rate]
        steps_left = min(s.rem / (rate[s.seq] * dt) for s in running)
        block = max(0, math.floor(steps_left) - 2)
        for s in running:
            s.rem -= block * rate[s.seq] * dt
        step += block
        # single steps until something completes
        while True:
            for s in running:
                s.rem -= rate[s.seq] * dt
            step += 1
            done = [s for s in running if s.rem <= EPS]
            if done:
                break
        now = step * dt
        for s in done:
            subs.remove(s)
        remaining_tasks = {s.task for s in subs}
        for s in done:
            if s.task not in remaining_tasks and s.task not in finish:
                finish[s.task] = now
        if outliers:
            _resplit_all(adj, subs, owner, theta)
    return finish


def _resplit_all(adj, subs, owner, theta):
    next_seq = max([0] + [s.seq for s in subs]) + 1
    fired = True
    while fired:
        fired = False
        open_by_task = {}
        for s in subs:
            open_by_task.setdefault(s.task, []).append(s)
        busy = {}
        for s in subs:
            busy[s.worker] = busy.get(s.worker, 0) + 1
        for tid in sorted(open_by_task):
            group = open_by_task[tid]
            if len(group) != 1:
                continue
            s = group[0]
            if s not in subs:
                continue
            idle = [v for v in sorted(adj[owner[tid]]) if v != s.worker and busy.get(v, 0) == 0]
            if not idle:
                continue
            if busy[s.worker] < 2 and len(idle) < 2:
                continue
            if s.rem < theta * len(idle):
                continue
            subs.remove(s)
            busy[s.worker] -= 1
            for v in idle:
                subs.append(_Sub(tid, v, s.rem / len(idle), next_seq))
                next_seq += 1
                busy[v] = 1
            fired = True
