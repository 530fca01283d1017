# Loading an edge list and looking at its shape.
#
# Any whitespace-separated pair file works; '#' lines are skipped, directed
# pairs are made undirected, and duplicate edges and self-loops are dropped.
import os
import tempfile

from socialcloud import graph_stats, load_graph
from socialcloud.graph import largest_component

text = """# a tiny directed "who trusts whom" list
alice bob
bob alice
bob carol
carol dave
dave dave
erin frank
"""

with tempfile.TemporaryDirectory() as tmp:
    path = os.path.join(tmp, "friends.txt")
    with open(path, "w") as fh:
        fh.write(text)
    g = load_graph(path)

print("labels -> ids:", {lab: g.id_of(lab) for lab in g.labels})
print(graph_stats(g))
for v in range(g.node_count):
    print(f"  {g.label_of(v):>5} has friends {[g.label_of(w) for w in g.neighbors(v)]}")

# Published network sizes usually refer to the largest connected component.
core = largest_component(g)
print("largest component:", core.labels, "with", core.edge_count, "edges")
