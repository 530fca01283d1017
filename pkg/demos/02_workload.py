# Who outsources, how big the tasks are, and how they get split.
from _toy import toy_graph

from socialcloud import TaskSizeModel, make_tasks, split_task

g = toy_graph()

# Each node has a task with probability p. Isolated nodes are skipped since
# nobody could work for them.
for p in (0.1, 0.3, 0.5):
    tasks, skipped = make_tasks(g, p, TaskSizeModel.constant(1000), seed=7)
    print(f"p={p}: {len(tasks)} outsourcers out of {g.node_count} nodes ({skipped} isolated)")

# The same seed picks the same outsourcers whatever the size model, so the
# two models can be compared task by task.
const, _ = make_tasks(g, 0.3, TaskSizeModel.constant(1000), seed=7)
varied, _ = make_tasks(g, 0.3, TaskSizeModel.uniform(500, 1500), seed=7)
print("same outsourcers:", [t.outsourcer for t in const] == [t.outsourcer for t in varied])
print("uniform sizes:", [t.size / 1e6 for t in varied[:6]], "...")

# A task is cut into equal shares, one per neighbour (work is kept in integer
# micro-units, so shares sum exactly to the task).
task = varied[0]
subs = split_task(task, g)
print(f"task of {task.size / 1e6:.6f} units from node {task.outsourcer} ->",
      [(s.worker, s.assigned / 1e6) for s in subs])
print("sum matches:", sum(s.assigned for s in subs) == task.size)
