# Re-outsourcing a straggler's leftover work to idle neighbours.
#
# u=0 splits 900 units over w=2, a=3, b=4; v=1 gives all 600 of its units
# to w. With round robin, a and b finish at t=300 while w still holds 150
# of u's share. Those 150 units move to a and b, 75 each.
from socialcloud import SimConfig, from_edges, run_simulation
from socialcloud.workload import SCALE, TaskSpec

g = from_edges([(0, 2), (0, 3), (0, 4), (1, 2)])
tasks = [TaskSpec(0, 0, 900 * SCALE), TaskSpec(1, 1, 600 * SCALE)]

for outliers in (False, True):
    res = run_simulation(g, tasks, SimConfig(policy="rr", outliers=outliers, trace=True))
    label = "handled" if outliers else "unhandled"
    print(label, {o.task_id: round(o.x, 4) for o in res.outcomes})
    for line in res.trace:
        print("   ", line)

# A quantum keeps re-splitting from chasing ever smaller pieces: nothing is
# moved when each idle node would get less than theta units.
res = run_simulation(g, tasks, SimConfig(policy="rr", theta=100.0))
print("theta=100:", {o.task_id: round(o.x, 4) for o in res.outcomes},
      "resplits", [o.resplits for o in res.outcomes])
