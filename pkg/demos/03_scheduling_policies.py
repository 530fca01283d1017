# Three local scheduling policies on one shared worker.
#
# Nodes u=0 and v=1 each outsource 1000 units. They share the worker w=2;
# u also uses a=3 and v uses b=4. Every share is 500 units.
from socialcloud import SimConfig, from_edges, run_simulation
from socialcloud.workload import SCALE, TaskSpec

g = from_edges([(0, 2), (0, 3), (1, 2), (1, 4)])
tasks = [TaskSpec(0, 0, 1000 * SCALE), TaskSpec(1, 1, 1000 * SCALE)]

for policy in ("rr", "sf", "lf"):
    res = run_simulation(g, tasks, SimConfig(policy=policy, outliers=False, trace=True))
    xs = [round(o.x, 3) for o in res.outcomes]
    print(f"{policy.upper()}: x_u, x_v = {xs}")
    for line in res.trace:
        print("   ", line)

# Round robin splits w evenly, so both shares end at t=1000. A serial worker
# finishes u's share first (ties go to the lower outsourcer id).
