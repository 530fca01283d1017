# Messages needed to keep a group of d workers in sync, once per round.
# A central scheduler costs 2d per group; peers talking directly cost d(d-1).
import numpy as np
from _toy import toy_graph

from socialcloud import control_messages, total_control_overhead

for d in (2, 5, 10, 50):
    print(f"d={d:>3}: centralized {control_messages('centralized', d):>5}, "
          f"decentralized {control_messages('decentralized', d):>5}")

g = toy_graph()
for mode in ("centralized", "decentralized"):
    rep = total_control_overhead(g, mode)
    print(mode, rep["total_messages"], rep["asymptotic"])
print("mean degree", np.mean(g.degrees()))
