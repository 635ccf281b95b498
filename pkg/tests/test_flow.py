from __future__ import annotations

import random

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import corpus
from pfc import zx
from pfc.flow import (
    PFFlow,
    SizeExceeded,
    exhaustive_flow_oracle,
    exhaustive_flow_witness,
    find_corrector,
    find_pf_flow,
    load_flow,
    odd_neighborhood,
    save_flow,
    validate_pf_flow,
)
from pfc.graphlike import Signature, build_signature, to_graph_like


def line(*, pinned=()):
    return Signature.from_graph([("i", "v"), ("v", "o")], inputs=["i"], outputs=["o"], pinned=pinned)


@st.composite
def signatures(draw, max_vertices=8):
    """Arbitrary graphs with arbitrary I/O roles."""
    return corpus.random_signature(random.Random(draw(st.integers(0, 2**32))), max_vertices)


@st.composite
def open_signatures(draw, max_diagram=6):
    """Signatures of diagrams: I/O endpoints of degree one."""
    return corpus.random_open_signature(random.Random(draw(st.integers(0, 2**32))), max_diagram)


def test_odd_examples():
    path = Signature.from_graph([("a", "b"), ("b", "c")])
    assert odd_neighborhood(path, []) == frozenset()
    assert odd_neighborhood(path, ["b"]) == {"a", "c"}
    assert odd_neighborhood(path, ["a", "c"]) == frozenset()
    looped = Signature.from_graph([], pinned=["v"], loops=["v"])
    assert odd_neighborhood(looped, ["v"]) == {"v"}


@given(signatures(), st.data())
def test_odd_is_linear_over_symmetric_difference(sig, data):
    a = data.draw(st.sets(st.sampled_from(sig.vertices)))
    b = data.draw(st.sets(st.sampled_from(sig.vertices)))
    assert odd_neighborhood(sig, a ^ b) == odd_neighborhood(sig, a) ^ odd_neighborhood(sig, b)


def test_corrector_on_a_line():
    assert find_corrector(line(), {"o"}, "v") == {"o"}
    lonely = Signature.from_graph([("i", "v"), ("o", "w")], inputs=["i"], outputs=["o"], vertices=["v", "w"])
    assert find_corrector(lonely, {"o"}, "v") is None
    with pytest.raises(ValueError):
        find_corrector(line(), {"o"}, "o")


@given(signatures(), st.data())
def test_corrector_is_sound_and_complete(sig, data):
    marked = frozenset(data.draw(st.sets(st.sampled_from(sig.vertices))))
    free = [v for v in sig.vertices if v not in marked]
    if not free:
        return
    u = data.draw(st.sampled_from(free))
    c = find_corrector(sig, marked, u)
    if c is None:
        assert not corpus.brute_force_corrector(sig, marked, u)
    else:
        assert c <= marked | sig.pinned
        assert odd_neighborhood(sig, c) - marked == {u}


def test_single_spider_line_flow():
    flow = find_pf_flow(line(pinned=["v"]))
    assert flow is not None
    assert flow.layers == {"o": 0, "v": 1, "i": 2}
    assert flow.f == {"v": "i"}
    assert flow.rounds == 1


def test_two_input_spider_has_no_flow():
    sig = Signature.from_graph([("i1", "v"), ("i2", "v")], inputs=["i1", "i2"])
    assert find_pf_flow(sig) is None
    assert not exhaustive_flow_oracle(sig)


def test_identity_wire_has_flow():
    assert exhaustive_flow_oracle(line())
    assert find_pf_flow(line()) is not None


def test_fig1_finder_matches_oracle(data_dir):
    g = to_graph_like(zx.load((data_dir / "fig1.zx.json").read_text()))
    sig = build_signature(g)
    assert (find_pf_flow(sig) is not None) == exhaustive_flow_oracle(sig)


@settings(max_examples=200)
@given(open_signatures())
def test_finder_output_validates_and_agrees_with_oracle(sig):
    flow = find_pf_flow(sig)
    if flow is not None:
        assert validate_pf_flow(sig, flow) == []
        assert flow.rounds <= len(sig.diagram_vertices)
        assert all(flow.layers[o] == 0 for o in sig.outputs)
    assert (flow is not None) == exhaustive_flow_oracle(sig)


@given(signatures(max_vertices=9))
def test_oracle_witness_validates(sig):
    w = exhaustive_flow_witness(sig)
    if w is not None:
        assert validate_pf_flow(sig, w) == []


def test_oracle_refuses_large_signatures():
    sig = Signature.from_graph([(f"v{k}", f"v{k + 1}") for k in range(11)])
    with pytest.raises(SizeExceeded):
        exhaustive_flow_oracle(sig)


def test_validator_cites_the_corrector_ordering_clause():
    sig = line(pinned=["v"])
    flow = find_pf_flow(sig)
    # i is not pinned and precedes v, so it may not appear in a corrector of v
    bad = PFFlow(flow.layers, flow.f, {("v", "v"): frozenset({"i"})})
    clauses = {p.clause for p in validate_pf_flow(sig, bad)}
    assert "corrector-ordering" in clauses


def test_validator_cites_same_layer_adjacency():
    sig = Signature.from_graph([("o", "a"), ("a", "b"), ("b", "o2")], outputs=["o", "o2"], pinned=["a", "b"])
    flat = PFFlow({"o": 0, "o2": 0, "a": 1, "b": 1}, {"a": "o", "b": "o2"}, {})
    assert "same-layer adjacency" in {p.clause for p in validate_pf_flow(sig, flat)}


def test_validator_reports_missing_correctors():
    sig = line(pinned=["v"])
    flow = find_pf_flow(sig)
    stripped = PFFlow(flow.layers, {"v": "o"}, {})
    clauses = {p.clause for p in validate_pf_flow(sig, stripped)}
    assert "past-corrector" in clauses


def test_same_round_neighbours_are_refined_and_recorded():
    # a and b are both correctable from the outputs in round one
    sig = Signature.from_graph(
        [("a", "b"), ("a", "oa"), ("b", "ob")], outputs=["oa", "ob"], pinned=["a", "b"]
    )
    flow = find_pf_flow(sig)
    assert flow is not None
    assert ("a", "b") in flow.refinements
    assert flow.precedes("a", "b")
    assert validate_pf_flow(sig, flow) == []


def test_flow_json_round_trip(data_dir):
    g = to_graph_like(zx.load((data_dir / "fig1.zx.json").read_text()))
    flow = find_pf_flow(build_signature(g))
    text = save_flow(flow)
    assert load_flow(text) == flow
    assert save_flow(load_flow(text)) == text


def test_layers_form_a_dag_consistent_with_adjacency():
    rng = random.Random(3)
    for _ in range(50):
        sig = corpus.random_signature(rng, 10)
        flow = find_pf_flow(sig)
        if flow is None:
            continue
        dag = nx.DiGraph()
        dag.add_nodes_from(sig.vertices)
        for a, b in sig.edges:
            if flow.layers[a] != flow.layers[b]:
                dag.add_edge(*((a, b) if flow.precedes(a, b) else (b, a)))
        assert nx.is_directed_acyclic_graph(dag)
