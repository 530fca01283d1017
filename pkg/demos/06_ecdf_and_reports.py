# Normalised finishing time x = T_last / T_tot and its empirical CDF.
import os
import tempfile

from _toy import toy_graph

from socialcloud import SimConfig, ecdf, emit_results, run_simulation, summarize

g = toy_graph()
res = run_simulation(g, cfg=SimConfig(p=0.4, seed=1))
xs = [o.x for o in res.outcomes if o.completed]
series = ecdf(xs)
for x in (0.25, 0.5, 1.0, 1.5, 2.0):
    print(f"F({x}) = {series.at(x):.3f}")

summary = summarize(res, g.name, seed=1)
print("summary:", summary.frac_x1, summary.median_x, summary.overhead)

with tempfile.TemporaryDirectory() as tmp:
    for path in emit_results(res.outcomes, summary, tmp):
        with open(path) as fh:
            head = fh.read().splitlines()[:3]
        print(os.path.basename(path))
        for line in head:
            print("   ", line)
