"""Control-plane message counts for centralized vs decentralized state sync."""

from __future__ import annotations

MODES = ("centralized", "decentralized")


def control_messages(mode: str, d: int) -> int:
    """Messages to synchronise the states of a group of ``d`` nodes.

    A central server needs ``d`` uploads and ``d`` replies; without one every
    node sends its state to every other node.
    """
    if d < 1:
        raise ValueError("group size must be at least 1")
    if mode == "centralized":
        return 2 * d
    if mode == "decentralized":
        return d * (d - 1)
    raise ValueError(f"unknown overhead mode {mode!r}")


def overhead_report(mode: str, group_sizes, sync_rounds: int = 1) -> dict:
    per_round = sum(control_messages(mode, d) for d in group_sizes if d >= 1)
    return {
        "mode": mode,
        "sync_rounds": sync_rounds,
        "total_messages": per_round * sync_rounds,
        "asymptotic": "O(n)" if mode == "centralized" else "O(n^2)",
    }


def total_control_overhead(g, mode: str, outsourcers=None) -> dict:
    """Messages for one sync round over every outsourcer's neighbour group.

    ``outsourcers=None`` treats every node with at least one neighbour as an
    outsourcer.
    """
    deg = g.degrees()
    if outsourcers is None:
        sizes = deg[deg > 0].tolist()
    else:
        sizes = [int(deg[u]) for u in outsourcers]
    return overhead_report(mode, sizes)
