"""Small graphs and random instances shared by the engine tests."""

import numpy as np

from socialcloud.graph import from_edges
from socialcloud.workload import SCALE, TaskSpec

U = SCALE


def shared_worker_graph():
    # u=0, v=1, w=2, a=3, b=4: u-w, u-a, v-w, v-b
    return from_edges([(0, 2), (0, 3), (1, 2), (1, 4)], n=5)


def resplit_graph():
    # u=0 with neighbours w=2, a=3, b=4; v=1 with the single neighbour w
    return from_edges([(0, 2), (0, 3), (0, 4), (1, 2)], n=5)


def random_instance(rng):
    """Random graph with n in [4, 20] and 1-6 tasks of size U[500, 1500]."""
    n = int(rng.integers(4, 21))
    while True:
        density = rng.uniform(0.1, 0.5)
        edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < density]
        g = from_edges(edges, n=n)
        cand = np.flatnonzero(g.degrees() > 0)
        if cand.size:
            break
    k = int(rng.integers(1, min(6, cand.size) + 1))
    outs = sorted(rng.choice(cand, size=k, replace=False).tolist())
    tasks = [TaskSpec(i, u, int(rng.integers(500 * U, 1500 * U))) for i, u in enumerate(outs)]
    return g, tasks
