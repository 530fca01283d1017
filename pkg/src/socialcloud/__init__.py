"""Simulator for computing outsourced to 1-hop neighbours in a social graph."""

from .engine import FailureSpec, Policy, SimConfig, Simulation, TaskOutcome, run_simulation
from .graph import Graph, GraphStats, degree, from_edges, graph_stats, load_graph, write_edgelist
from .metrics import ecdf, emit_results, normalized_time, summarize
from .overhead import control_messages, total_control_overhead
from .workload import TaskSizeModel, TaskSpec, make_tasks, sample_outsourcers, split_task

__version__ = "0.1.0"
