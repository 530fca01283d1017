# Shared toy network for the demos: two tight friend groups joined by a bridge.
import numpy as np

from socialcloud import from_edges


def toy_graph(seed=4):
    rng = np.random.default_rng(seed)
    edges = []
    for lo, hi in ((0, 40), (40, 80)):
        for i in range(lo, hi):
            for j in range(i + 1, hi):
                if rng.random() < 0.12:
                    edges.append((i, j))
    edges.append((39, 40))
    return from_edges(edges, name="toy")
