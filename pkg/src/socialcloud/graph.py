"""Undirected social graph: edge-list ingestion, CSR adjacency, and summary stats."""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np


class GraphFormatError(ValueError):
    """Raised when an edge-list file cannot be parsed."""


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected graph with dense node ids ``0..n-1``.

    Adjacency is stored in CSR form: the neighbours of ``v`` are
    ``indices[indptr[v]:indptr[v + 1]]``, sorted ascending.
    """

    indptr: np.ndarray
    indices: np.ndarray
    labels: tuple = field(default=())
    name: str = ""

    @property
    def node_count(self) -> int:
        return len(self.indptr) - 1

    @property
    def edge_count(self) -> int:
        return len(self.indices) // 2

    n = node_count
    m = edge_count

    def neighbors(self, v: int) -> np.ndarray:
        if not 0 <= v < self.node_count:
            raise IndexError(f"node id {v} out of range [0, {self.node_count})")
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def label_of(self, v: int):
        return self.labels[v] if self.labels else v

    def id_of(self, label) -> int:
        if not self.labels:
            return int(label)
        index = getattr(self, "_label_index", None)
        if index is None:
            index = {lab: i for i, lab in enumerate(self.labels)}
            object.__setattr__(self, "_label_index", index)
        return index[label]

    def adjacency_lists(self) -> list[list[int]]:
        ptr = self.indptr.tolist()
        idx = self.indices.tolist()
        return [idx[ptr[v]:ptr[v + 1]] for v in range(self.node_count)]

    def edges(self):
        """Yield each undirected edge once as ``(u, v)`` with ``u < v``."""
        ptr = self.indptr.tolist()
        idx = self.indices.tolist()
        for u in range(self.node_count):
            for v in idx[ptr[u]:ptr[u + 1]]:
                if u < v:
                    yield u, v

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
            and tuple(self.labels) == tuple(other.labels)
        )

    __hash__ = None


@dataclass(frozen=True)
class GraphStats:
    n: int
    m: int
    min_degree: int
    max_degree: int
    mean_degree: float
    density: float
    isolated: int


def from_edges(edges, n: int | None = None, labels=(), name: str = "") -> Graph:
    """Build a symmetrised, deduplicated, loop-free graph from id pairs.

    ``n`` defaults to one past the largest id seen; ids beyond it are an error.
    """
    arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges,
                     dtype=np.int64).reshape(-1, 2)
    if n is None:
        n = int(arr.max()) + 1 if arr.size else 0
    if arr.size and (arr.min() < 0 or arr.max() >= n):
        raise ValueError("edge endpoint outside [0, n)")
    arr = arr[arr[:, 0] != arr[:, 1]]
    both = np.concatenate([arr, arr[:, ::-1]])
    # unique on the packed key sorts by (source, target)
    key = np.unique(both[:, 0] * np.int64(n) + both[:, 1])
    src = key // n
    dst = key % n
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
    return Graph(indptr=indptr, indices=dst.astype(np.int64), labels=tuple(labels), name=name)


def _label_sort_key(labels):
    if all(isinstance(x, int) for x in labels):
        return sorted(labels)
    return sorted(labels, key=str)


def parse_edge_lines(lines, source: str = "<edges>") -> tuple[list, list]:
    pairs = []
    seen = set()
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphFormatError(f"{source}:{lineno}: expected two labels, got {len(parts)}")
        a, b = (int(x) if _is_int(x) else x for x in parts)
        pairs.append((a, b))
        seen.add(a)
        seen.add(b)
    return pairs, _label_sort_key(seen)


def _is_int(token: str) -> bool:
    try:
        int(token)
    except ValueError:
        return False
    return True


def load_graph(path, format: str = "edgelist", name: str | None = None) -> Graph:
    """Load an edge list into a :class:`Graph`.

    Lines hold two whitespace-separated labels; ``#`` lines and blank lines
    are skipped. Directed inputs are symmetrised. Labels are mapped to dense
    ids in sorted label order (numeric when every label is an integer).
    """
    if format != "edgelist":
        raise ValueError(f"unsupported graph format {format!r}")
    path = os.fspath(path)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            pairs, labels = parse_edge_lines(fh, source=path)
    except OSError as exc:
        raise GraphFormatError(f"cannot read {path}: {exc}") from exc
    if not pairs:
        raise GraphFormatError(f"{path}: empty graph")
    ids = {lab: i for i, lab in enumerate(labels)}
    edges = np.fromiter((ids[x] for pair in pairs for x in pair), dtype=np.int64,
                        count=2 * len(pairs))
    if name is None:
        name = os.path.splitext(os.path.basename(path))[0]
    g = from_edges(edges, n=len(labels), labels=labels, name=name)
    if g.edge_count == 0:
        raise GraphFormatError(f"{path}: no edges after removing self-loops")
    return g


def write_edgelist(g: Graph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for u, v in g.edges():
            fh.write(f"{g.label_of(u)} {g.label_of(v)}\n")


def degree(g: Graph, v: int) -> int:
    if not 0 <= v < g.node_count:
        raise IndexError(f"node id {v} out of range [0, {g.node_count})")
    return int(g.indptr[v + 1] - g.indptr[v])


def graph_stats(g: Graph) -> GraphStats:
    n, m = g.node_count, g.edge_count
    deg = g.degrees()
    return GraphStats(
        n=n,
        m=m,
        min_degree=int(deg.min()) if n else 0,
        max_degree=int(deg.max()) if n else 0,
        mean_degree=2 * m / n if n else 0.0,
        density=2 * m / (n * (n - 1)) if n > 1 else 0.0,
        isolated=int((deg == 0).sum()),
    )


def largest_component(g: Graph) -> Graph:
    """Return the largest connected component, relabelled densely.

    Published sizes for public snapshots usually refer to this component.
    """
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import connected_components

    n = g.node_count
    mat = csr_matrix((np.ones(len(g.indices), dtype=np.int8), g.indices, g.indptr), shape=(n, n))
    _, comp = connected_components(mat, directed=False)
    keep = np.flatnonzero(comp == np.bincount(comp).argmax())
    remap = np.full(n, -1, dtype=np.int64)
    remap[keep] = np.arange(len(keep))
    src = np.repeat(np.arange(n), g.degrees())
    mask = remap[src] >= 0
    edges = np.stack([remap[src[mask]], remap[g.indices[mask]]], axis=1)
    labels = tuple(g.labels[i] for i in keep) if g.labels else tuple(keep.tolist())
    return from_edges(edges, n=len(keep), labels=labels, name=g.name)
