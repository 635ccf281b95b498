"""
Branch ratios of a compiled procedure
=====================================

Each outcome pattern of a compiled procedure implements the source map up
to a scalar. The scalars always share one modulus. When a quarter-turn
spider sits inside a corrector the ratio picks up a factor of i, because
X R(pi/2) X equals i R(pi/2) Z.
"""

import random
from collections import Counter

import numpy as np

from pfc import zx
from pfc.compile import compile_to_pf
from pfc.flow import find_pf_flow
from pfc.graphlike import ZeroDiagram, build_signature, to_graph_like
from pfc.semantics import check_determinism
from pfc.zx import X, Z, ZXDiagram

rng = random.Random(3)
phases = ["0", "1/4", "1/2", "1", "3/2", "7/4"]


def sample():
    n = rng.randint(2, 6)
    nodes = [(f"s{k}", rng.choice([Z, X]), rng.choice(phases)) for k in range(n)]
    edges = [(f"s{k}", f"s{rng.randrange(k)}") for k in range(1, n)]
    wires = rng.sample(range(n), min(n, 2))
    return ZXDiagram.build(nodes, edges, [("i0", f"s{wires[0]}")], [("o0", f"s{wires[-1]}")])


classes = Counter()
shown = False
for _ in range(60):
    try:
        g = to_graph_like(sample())
    except ZeroDiagram:
        continue
    flow = find_pf_flow(build_signature(g))
    if flow is None:
        continue
    pf, _ = compile_to_pf(g, flow)
    report = check_determinism(pf, g.inner, allow_global_phase=True)
    classes[report.phase_class] += 1
    if report.phase_class == "global_phase" and not shown:
        shown = True
        print("bits:", report.bits)
        for b in report.branches:
            ratio = b.scalar / report.reference_scalar
            print(f"  branch {b.branch}: ratio {np.round(ratio, 6)}")

print("phase classes over the sample:", dict(classes))
