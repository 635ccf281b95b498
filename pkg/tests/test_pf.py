from __future__ import annotations

import json

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pfc.pf import (
    ARITY,
    MissingBit,
    PFDiagram,
    PFFormatError,
    PFNode,
    ThetaAnnotation,
    branch_diagram,
    dependency_cycle,
    dependency_edges,
    pf_load,
    pf_save,
    theta,
    time_ordering,
)
from pfc.zx import Phase

alphas = st.builds(Phase, st.integers(0, 15), st.sampled_from([1, 2, 4, 8]))


def test_theta_examples():
    a = ThetaAnnotation(Phase(1, 4), {"s"}, {"t"})
    assert theta(a, {"s": 0, "t": 0}) == Phase(1, 4)
    assert theta(a, {"s": 1, "t": 0}) == Phase(7, 4)
    assert theta(a, {"s": 1, "t": 1}) == Phase(3, 4)
    with pytest.raises(MissingBit, match="'t'"):
        theta(a, {"s": 0})


@given(alphas, st.lists(st.booleans(), min_size=3, max_size=3), st.lists(st.booleans(), min_size=3, max_size=3))
def test_theta_is_equivariant_in_its_bits(alpha, svals, tvals):
    s_labels, t_labels = ["a", "b", "c"], ["a", "d", "e"]
    a = ThetaAnnotation(alpha, frozenset(s_labels), frozenset(t_labels))
    bits = {**dict(zip(s_labels, map(int, svals))), **dict(zip(t_labels, map(int, tvals)))}
    base = theta(a, bits)
    for label in ["b", "c"]:  # S only: sign flip
        flipped = dict(bits, **{label: 1 - bits[label]})
        sign = 1 if sum(bits[v] for v in s_labels) % 2 == 0 else -1
        assert theta(a, flipped) == base - Phase.of(2 * sign * alpha.fraction)
    for label in ["d", "e"]:  # T only: shift by pi
        assert theta(a, dict(bits, **{label: 1 - bits[label]})) == base + Phase(1)


def chain(depth: int, controls: list[tuple[int, int]]) -> PFDiagram:
    """Merges m0..m{depth-1} in a line, each followed by a rotation r_k;
    ``controls`` lists (rotation k, merge j) pairs putting bit m_j into T of r_k."""
    nodes, edges, inputs = {}, [], [("w", "m0", 0)]
    for k in range(depth):
        ts = frozenset(f"m{j}" for kk, j in controls if kk == k)
        nodes[f"m{k}"] = PFNode(f"m{k}", "MergeV")
        nodes[f"r{k}"] = PFNode(f"r{k}", "RotV", ThetaAnnotation(Phase(1, 4), frozenset(), ts))
        inputs.append((f"x{k}", f"m{k}", 1))
        edges.append((f"m{k}", 0, f"r{k}", 0))
        if k:
            edges.append((f"r{k - 1}", 0, f"m{k}", 0))
    outputs = [("out", f"r{depth - 1}", 0)]
    return PFDiagram(nodes, tuple(edges), tuple(inputs), tuple(outputs), frozenset(f"m{k}" for k in range(depth)))


@given(st.integers(1, 6), st.data())
def test_time_ordering_agrees_with_cycle_detection(depth, data):
    pairs = data.draw(st.lists(st.tuples(st.integers(0, depth - 1), st.integers(0, depth - 1)), max_size=5))
    d = chain(depth, pairs)
    assert d.problems() == []
    g = nx.DiGraph()
    g.add_nodes_from(d.nodes)
    g.add_edges_from((a, b) for a, b, _ in dependency_edges(d))
    t = time_ordering(d)
    assert (t is None) == (not nx.is_directed_acyclic_graph(g))
    assert (t is None) == (dependency_cycle(d) is not None)
    if t is not None:
        assert all(t[a] < t[b] for a, b in g.edges)
        assert min(t.values()) == 1
    else:
        cycle = dependency_cycle(d)
        assert cycle[0][0] == cycle[-1][1]


def test_nonrunnable_example_names_its_cycle(data_dir):
    d = pf_load((data_dir / "nonrunnable.pf.json").read_text())
    assert time_ordering(d) is None
    assert dependency_cycle(d) == [("u", "w", "wire"), ("w", "u", "control")]
    fixed = pf_load((data_dir / "reordered.pf.json").read_text())
    assert time_ordering(fixed) is not None


@given(st.integers(1, 4), st.data())
def test_branch_picture_size_is_independent_of_bits(depth, data):
    d = chain(depth, [(k, k) for k in range(depth)])
    bits = sorted(d.internal_bits)
    x = data.draw(st.lists(st.integers(0, 1), min_size=len(bits), max_size=len(bits)))
    zero = branch_diagram(d, dict.fromkeys(bits, 0))
    other = branch_diagram(d, dict(zip(bits, x)))
    assert len(zero.nodes) == len(other.nodes)
    assert len(zero.edges) == len(other.edges)


def test_problems_catch_arity_and_bits():
    nodes = {"m": PFNode("m", "MergeH"), "r": PFNode("r", "RotH", ThetaAnnotation(Phase(), {"ghost"}, ()))}
    d = PFDiagram(nodes, (("m", 0, "r", 0), ("m", 1, "r", 0)), (), (), frozenset())
    text = " ".join(d.problems())
    assert "fed more than once" in text
    assert "port 1 is wired" in text
    assert "missing from the bit set" in text
    assert "undeclared bit 'ghost'" in text


def test_only_rotations_carry_annotations():
    with pytest.raises(PFFormatError):
        PFNode("p", "ProjV", ThetaAnnotation())
    assert PFNode("r", "RotV").theta == ThetaAnnotation()
    assert set(ARITY) == {
        "SplitV", "MergeV", "RotV", "SplitH", "MergeH", "RotH", "InitV", "InitH", "Had", "ProjV", "ProjH", "Swap"
    }


def test_json_round_trip_is_byte_stable(data_dir):
    for name in ("nonrunnable.pf.json", "reordered.pf.json"):
        d = pf_load((data_dir / name).read_text())
        text = pf_save(d)
        assert pf_load(text) == d
        assert pf_save(pf_load(text)) == text


@pytest.mark.parametrize(
    "payload, fragment",
    [
        ({"nodes": [{"id": "a", "op": "Teleport"}]}, "unknown op"),
        ({"nodes": [{"id": "a", "op": "ProjV", "theta": {}}]}, "only rotations"),
        ({"nodes": [], "edges": [["a", "0", "b", 0]]}, "expected \\[src"),
        ({"nodes": [{"id": "a", "op": "InitV"}]}, "output port 0 is unconnected"),
    ],
)
def test_malformed_pf_json(payload, fragment):
    with pytest.raises(PFFormatError, match=fragment):
        pf_load(json.dumps(payload))
