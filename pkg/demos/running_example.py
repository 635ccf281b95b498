"""
From a ZX diagram to a runnable procedure
=========================================

Walks the bundled three-qubit example through every stage: normalization,
signature, flow, compilation, time ordering and branch verification.
"""

from importlib.resources import files

from pfc import zx
from pfc.compile import compile_to_pf
from pfc.flow import find_pf_flow
from pfc.graphlike import build_signature, to_graph_like
from pfc.pf import time_ordering
from pfc.semantics import check_determinism

source = zx.load(files("pfc.data").joinpath("fig1.zx.json").read_text())
print(f"source: {len(source.nodes)} nodes, {len(source.edges)} edges")

# graph-like form: only Z and X spiders, simple edges, no closed pieces
g = to_graph_like(source)
print(f"graph-like: {len(g.nodes)} spiders, scalar {complex(g.inner.scalar):.3f}")

# the signature forgets colours and keeps adjacency, I/O and phase classes
sig = build_signature(g)
print("pinned:", sorted(sig.pinned), "loops:", sorted(sig.loops))

flow = find_pf_flow(sig)
assert flow is not None
print("layers:", flow.layers)
for (u, v), C in sorted(flow.correctors.items()):
    print(f"  corrector for {u} -> {v}: {sorted(C)}")

pf, trace = compile_to_pf(g, flow)
for step in trace.steps:
    print(f"pass {step['step']} ({step['name']}):", step.get("inserted", step.get("modified")))

order = time_ordering(pf)
print("time layers:", max(order.values()) + 1)

report = check_determinism(pf, g.inner, allow_global_phase=True)
print(f"{len(report.branches)} branches, phase class {report.phase_class}, passed {report.passed}")
