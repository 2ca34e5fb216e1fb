"""
Files and the command line
==========================

Write a network to an edge list, then drive the ``sbmperturb`` command from
Python. The same commands work from a shell.
"""

# %%
import json
import pathlib
import tempfile

from sbmperturb import oracle_labels, benchmark_model, sample_adjacency, write_adjacency, write_labels
from sbmperturb.cli import run_command

work = pathlib.Path(tempfile.mkdtemp())
model = benchmark_model(2)
g = oracle_labels(model)
write_adjacency(work / "net.txt", sample_adjacency(model, g, seed=2))
write_labels(work / "labels.txt", g)

# %%
# gof-test exits with 3 when it rejects, so shell scripts can branch on it.
code = run_command(["gof-test", str(work / "net.txt"), "--k0", "2", "--labels", str(work / "labels.txt")])
print("exit code", code)

# %%
config = {"n": 200, "K": 2, "B": [[0.4, 0.1], [0.1, 0.4]], "reps": 50, "seed": 1, "statistics": ["chi_simple_cross"]}
(work / "config.json").write_text(json.dumps(config))
run_command(["simulate", str(work / "config.json"), "--out", str(work / "run"), "--no-timestamp"])
print(sorted(p.name for p in (work / "run").iterdir()))
print((work / "run" / "summary_chi_simple_cross.json").read_text())

# %%
run_command(["tw1", "--quantile", "0.95"])
