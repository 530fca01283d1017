# A small sweep through the command-line driver. Each cell gets its own
# directory of CSVs, and manifest.json lists every file with a checksum.
# The equivalent shell call is
#   socialcloud --graph toy.txt --p 0.1:0.5:0.2 --task const:1000 --overhead both --out DIR
import json
import os
import tempfile

from _toy import toy_graph

from socialcloud import write_edgelist
from socialcloud.cli import main

with tempfile.TemporaryDirectory() as tmp:
    path = os.path.join(tmp, "toy.txt")
    write_edgelist(toy_graph(), path)
    out = os.path.join(tmp, "results")
    status = main(["--graph", path, "--p", "0.1:0.5:0.2", "--task", "const:1000",
                   "--overhead", "both", "--out", out])
    with open(os.path.join(out, "manifest.json")) as fh:
        manifest = json.load(fh)
    print("exit status", status, "cells", len(manifest["cells"]))
    print(f"{'policy':>6} {'p':>4} {'out':>4} {'F(1)':>6}")
    for cell in manifest["cells"]:
        summary_file = [f["path"] for f in cell["files"] if f["path"].endswith("summary.json")][0]
        with open(os.path.join(out, summary_file)) as fh:
            frac = json.load(fh)["frac_x1"]
        print(f"{cell['policy']:>6} {cell['p']:>4} {'on' if cell['outlier'] else 'off':>4} "
              f"{frac:>6.3f}")
