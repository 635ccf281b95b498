from __future__ import annotations

import pytest

import corpus
from pfc import zx
from pfc.compile import FlowInvalid, compile_to_pf, save_trace
from pfc.flow import PFFlow, find_pf_flow
from pfc.graphlike import GraphLikeDiagram, NotGraphLike, build_signature, to_graph_like
from pfc.pf import PFDiagram, PFNode, ThetaAnnotation, time_ordering
from pfc.semantics.dense import eval_zx, proportional
from pfc.semantics.verify import check_determinism, eval_pf_branch
from pfc.zx import X, Z, ZXDiagram


def compiled(d: ZXDiagram):
    g = to_graph_like(d)
    flow = find_pf_flow(build_signature(g))
    assert flow is not None
    pf, trace = compile_to_pf(g, flow)
    return g, flow, pf, trace


def test_single_spider_wire():
    g, flow, pf, trace = compiled(ZXDiagram.build([("v", Z, "1/4")], [], [("i", "v")], [("o", "v")]))
    assert {n.op for n in pf.nodes.values()} == {"RotH", "RotV"}
    assert pf.nodes["v"].theta.alpha == zx.Phase(1, 4)
    assert pf.internal_bits == frozenset()
    assert proportional(eval_pf_branch(pf), eval_zx(g.inner)) is not None


FAMILY = {Z: {"MergeH", "SplitH", "RotV", "InitV", "ProjV"}, X: {"MergeV", "SplitV", "RotH", "InitH", "ProjH"}}


def test_every_inserted_node_belongs_to_its_vertex_colour_family():
    seen = set()
    for entry in corpus.cached_corpus(30, seed=7):
        pf, _ = compile_to_pf(entry.graph, entry.flow)
        for label, node in pf.nodes.items():
            owner = label.split("#")[0]
            if owner in entry.graph.nodes:
                assert node.op in FAMILY[entry.graph.nodes[owner].kind], (label, node.op)
                seen.add(node.op)
    assert {"MergeV", "MergeH", "SplitV", "SplitH", "ProjV", "ProjH"} <= seen


def test_terminal_vertices_end_in_a_projection():
    checked = 0
    for entry in corpus.cached_corpus(30, seed=7):
        pf, _ = compile_to_pf(entry.graph, entry.flow)
        for v, node in entry.graph.nodes.items():
            if not entry.flow.future(entry.signature, v):
                assert pf.nodes[v].op == ("ProjV" if node.kind == Z else "ProjH")
                assert pf.nodes[f"{v}#r"].op == ("RotV" if node.kind == Z else "RotH")
                assert v in pf.internal_bits
                checked += 1
    assert checked


def test_invalid_flow_is_rejected():
    d = ZXDiagram.build([("v", Z)], [], [("i", "v")], [("o", "v")])
    g = to_graph_like(d)
    broken = PFFlow({"v": 1, "i": 0, "o": 2}, {"v": "i"}, {})
    with pytest.raises(FlowInvalid, match="order"):
        compile_to_pf(g, broken)


@pytest.mark.parametrize("entry", corpus.cached_corpus(30, seed=7), ids=lambda e: f"{len(e.graph.nodes)}v")
def test_compiled_output_is_well_typed_runnable_and_proportional(entry):
    pf, trace = compile_to_pf(entry.graph, entry.flow)
    assert pf.problems() == []
    assert time_ordering(pf) is not None
    labels = set(pf.nodes)
    assert set(entry.graph.nodes) <= labels
    for v in entry.graph.nodes:
        assert pf.nodes[v].op in {"RotV", "RotH", "ProjV", "ProjH"}
    branch = eval_pf_branch(pf, dict.fromkeys(pf.internal_bits, 0))
    assert proportional(branch, eval_zx(entry.graph.inner)) is not None
    assert [s["step"] for s in trace.steps] == [0, 1, 2, 3, 4]
    assert save_trace(trace).endswith("\n")


def test_corrupting_a_shift_set_breaks_determinism():
    for entry in corpus.cached_corpus(30, seed=7):
        pf, _ = compile_to_pf(entry.graph, entry.flow)
        targets = [label for label, n in sorted(pf.nodes.items()) if n.theta is not None and n.theta.T]
        if targets:
            break
    else:  # pragma: no cover - the corpus always has a correction
        pytest.fail("no corrected rotation in the corpus")
    label = targets[0]
    node = pf.nodes[label]
    victim = sorted(node.theta.T)[0]
    nodes = dict(pf.nodes)
    nodes[label] = PFNode(label, node.op, ThetaAnnotation(node.theta.alpha, node.theta.S, node.theta.T - {victim}))
    broken = PFDiagram(nodes, pf.edges, pf.inputs, pf.outputs, pf.bits)
    report = check_determinism(broken, entry.graph.inner, allow_global_phase=True)
    assert not report.passed
    position = report.bits.index(victim)
    failing = [b.branch for b in report.branches if b.scalar is None]
    assert failing and all(branch[position] == "1" for branch in failing)
    assert "not proportional" in report.failures[0]


def test_graph_like_wrapper_is_required():
    with pytest.raises(NotGraphLike):
        GraphLikeDiagram(ZXDiagram.build([("a", Z), ("b", Z)], [("a", "b")]))
