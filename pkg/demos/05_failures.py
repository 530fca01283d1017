# Worker failures are handled like stragglers: the dead node's unfinished
# work goes to the outsourcer's idle neighbours, or waits until one frees up.
from _toy import toy_graph

from socialcloud import FailureSpec, SimConfig, run_simulation, summarize

g = toy_graph()
for rate in (0.0, 0.05, 0.2):
    cfg = SimConfig(p=0.3, seed=3, failures=FailureSpec(rate) if rate else None)
    res = run_simulation(g, cfg=cfg)
    s = summarize(res, g.name)
    lost = [o for o in res.outcomes if not o.completed]
    print(f"fail rate {rate}: {s.completed}/{s.tasks} done, F(1)={s.frac_x1:.3f}, "
          f"F(2)={s.frac_x2:.3f}, {len(lost)} stranded")
    for o in lost[:3]:
        print(f"    task {o.task_id} (degree {o.degree}) executed "
              f"{o.executed / 1e6:.1f} of {o.t_tot / 1e6:.0f} units")

# F(1) can go up with more failures. Stranded tasks leave the denominator,
# and moving a dead node's work onto idle neighbours rebalances it as well.
