from __future__ import annotations

import json
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pfc import zx
from pfc.zx import H, X, Z, Phase, ZXDiagram, ZXFormatError

fractions = st.builds(Fraction, st.integers(-16, 16), st.sampled_from([1, 2, 4, 8]))


@given(fractions, fractions, fractions)
def test_phase_addition_is_associative_and_reduced(a, b, c):
    p, q, r = Phase.of(a), Phase.of(b), Phase.of(c)
    assert (p + q) + r == p + (q + r)
    s = p + q
    assert 0 <= s.num < 2 * s.den
    assert s - q == p
    assert -(-p) == p


def test_phase_predicates():
    assert Phase.of("1/2").is_odd_multiple_of_half_pi()
    assert Phase.of("3/2").is_multiple_of_half_pi()
    assert not Phase.of("1/4").is_multiple_of_half_pi()
    assert Phase.of(1).is_multiple_of_pi() and not Phase.of(1).is_odd_multiple_of_half_pi()
    assert Phase.of(-1) == Phase.of(1)
    assert str(Phase.of("3/4")) == "3pi/4"
    with pytest.raises(ZeroDivisionError):
        Phase(1, 0)


def test_degree_and_neighbors_count_self_loops_twice():
    d = ZXDiagram.build([("a", Z), ("b", X)], [("a", "b"), ("a", "a")], [("i", "a")], [])
    assert d.degree("a") == 4
    assert sorted(d.neighbors("a")) == ["a", "a", "b"]


def test_validate_reports_each_problem():
    d = ZXDiagram.build([("a", Z), ("h", H)], [("a", "h"), ("a", "ghost")], [("w", "a"), ("w", "nowhere")], [])
    problems = zx.validate(d)
    text = " ".join(problems)
    assert "unknown node 'ghost'" in text
    assert "dangling input wire" in text
    assert "used more than once" in text
    assert "degree 1" in text


def test_hadamard_edge_sugar_expands_to_fresh_nodes():
    text = json.dumps(
        {
            "nodes": [{"id": "a", "kind": "Z"}, {"id": "b", "kind": "Z"}, {"id": "_h0", "kind": "X"}],
            "edges": [["a", "b", "h"]],
        }
    )
    d = zx.load(text)
    assert d.nodes["_h1"].kind == H
    assert sorted(d.edges) == [("_h1", "a"), ("_h1", "b")]


@pytest.mark.parametrize(
    "payload, fragment",
    [
        ({"nodes": [{"id": "a"}]}, "needs 'id' and 'kind'"),
        ({"nodes": [{"id": "a", "kind": "Y"}]}, "unknown node kind"),
        ({"nodes": [{"id": "a", "kind": "Z", "phase": {"num": 2, "den": 4}}]}, "not reduced"),
        ({"nodes": [{"id": "a", "kind": "Z", "phase": {"num": 1, "den": 0}}]}, "positive"),
        ({"nodes": [{"id": "a", "kind": "H", "phase": {"num": 1, "den": 1}}]}, "cannot carry a phase"),
        ({"nodes": [{"id": "a", "kind": "Z"}], "edges": [["a", "b"]]}, "unknown node 'b'"),
        ({"nodes": [{"id": "a", "kind": "Z"}], "edges": [["a", "a", "q"]]}, "unknown edge tag"),
        ({"nodes": [{"id": "a", "kind": "Z"}, {"id": "a", "kind": "X"}]}, "duplicate node id"),
    ],
)
def test_malformed_json_names_the_field(payload, fragment):
    with pytest.raises(ZXFormatError, match=fragment):
        zx.load(json.dumps(payload))


def test_syntax_error_reports_position():
    with pytest.raises(ZXFormatError, match="line 1, column"):
        zx.load("{nodes: }")


@st.composite
def diagrams(draw):
    n = draw(st.integers(1, 6))
    labels = [f"n{i}" for i in range(n)]
    nodes = [(v, draw(st.sampled_from([Z, X])), draw(fractions)) for v in labels]
    edges = draw(st.lists(st.tuples(st.sampled_from(labels), st.sampled_from(labels)), max_size=8))
    ins = draw(st.lists(st.sampled_from(labels), max_size=2))
    outs = draw(st.lists(st.sampled_from(labels), max_size=2))
    return ZXDiagram.build(
        nodes,
        edges,
        [(f"i{k}", v) for k, v in enumerate(ins)],
        [(f"o{k}", v) for k, v in enumerate(outs)],
        complex(draw(st.floats(-2, 2)), draw(st.floats(-2, 2))),
    )


@given(diagrams())
def test_save_load_round_trip_is_byte_stable(d):
    text = zx.save(d)
    again = zx.load(text)
    assert again == d
    assert zx.save(again) == text
