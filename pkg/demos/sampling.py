"""
Running a compiled procedure
============================

Samples outcomes through a compiled procedure and checks that every run
leaves the state proportional to the source map applied to the input.
"""

from importlib.resources import files

import numpy as np

from pfc import zx
from pfc.pipeline import PipelineConfig, full_pipeline
from pfc.semantics import eval_zx, proportional, run_procedure

res = full_pipeline(zx.load(files("pfc.data").joinpath("cnot.zx.json").read_text()), PipelineConfig(allow_global_phase=True))
print("pipeline outcome:", res.outcome)

m = eval_zx(res.graph_like.inner).matrix
rng = np.random.default_rng(0)
psi = rng.normal(size=m.shape[1]) + 1j * rng.normal(size=m.shape[1])
psi /= np.linalg.norm(psi)

hits = 0
for seed in range(200):
    run = run_procedure(res.pf, psi, seed=seed)
    hits += proportional(run.state, m @ psi) is not None
print(f"{hits}/200 runs match the source map")

last = run_procedure(res.pf, psi, seed=7)
print("one run's outcomes:", last.outcomes)
