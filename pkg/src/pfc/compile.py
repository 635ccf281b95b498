"""Compile a graph-like ZX diagram with a PF-flow into a runnable PF diagram.

Passes, in order:

0. orient every signature edge along the flow order and give each input and
   output endpoint a trivial rotation of the opposite colour;
1. decompose each vertex into a merge chain (or a preparation), one rotation
   carrying its phase, and a split chain (or a projection);
2. projections are a rotation followed by a measuring projection node;
3. merge corrections: a pi byproduct on a past neighbour ``u`` of ``v`` is
   pushed through the corrector ``C_{u,v}``;
4. projector corrections: the same for the projection bit of a vertex with
   no future neighbour, through ``C_{v,v}``.

A byproduct with bit ``b`` pushed through ``C`` toggles ``b`` in the sign set
of every ``t`` in ``C`` outside the pinned set and in the shift set of every
``w`` in ``Odd(C)`` other than the corrected vertex.

Node labels: a vertex ``v`` with future neighbours keeps ``v`` on its
rotation; otherwise the rotation is ``v#r`` and the projection is ``v``.
Merges are ``v#m<k>``, splits ``v#s<k>``, the preparation ``v#p``. A
correction touching an open-wire endpoint ``t`` also leaves a Pauli on the
open wire itself, undone by a frame rotation ``t#f``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from pfc.flow import PFFlow, odd_neighborhood, validate_pf_flow
from pfc.graphlike import GraphLikeDiagram, Signature, build_signature
from pfc.pf import PFDiagram, PFNode, ThetaAnnotation
from pfc.zx import X, Z, Phase

__all__ = [
    "FlowInvalid",
    "InternalArityError",
    "CompilationTrace",
    "compile_to_pf",
    "trace_to_dict",
    "save_trace",
]


class FlowInvalid(ValueError):
    """The supplied flow does not validate against the diagram's signature."""


class InternalArityError(RuntimeError):
    """A pass produced a mis-typed node; this is a compiler bug."""


_FAMILY = {
    # vertex colour -> (merge, rotation, split, preparation, projection)
    Z: ("MergeH", "RotV", "SplitH", "InitV", "ProjV"),
    X: ("MergeV", "RotH", "SplitV", "InitH", "ProjH"),
}
_ROT_OF_COLOUR = {Z: "RotV", X: "RotH"}
_OTHER = {Z: X, X: Z}


@dataclass
class CompilationTrace:
    """What each pass did.

    ``steps`` holds one entry per pass with the labels it inserted or
    modified; ``paths`` maps ``(u, v)`` to the merge labels whose byproduct
    lies on the wire from ``u`` into ``v``.
    """

    steps: list[dict[str, Any]] = field(default_factory=list)
    paths: dict[tuple[str, str], list[str]] = field(default_factory=dict)


@dataclass
class _Builder:
    nodes: dict[str, PFNode] = field(default_factory=dict)
    edges: list[tuple[str, int, str, int]] = field(default_factory=list)
    alpha: dict[str, Phase] = field(default_factory=dict)
    S: dict[str, set[str]] = field(default_factory=dict)
    T: dict[str, set[str]] = field(default_factory=dict)

    def add(self, label: str, op: str, alpha: Phase | None = None) -> str:
        if label in self.nodes:
            raise InternalArityError(f"label {label!r} inserted twice")
        self.nodes[label] = PFNode(label, op)
        if alpha is not None:
            self.alpha[label] = alpha
            self.S[label] = set()
            self.T[label] = set()
        return label

    def wire(self, src: tuple[str, int], dst: tuple[str, int]) -> None:
        self.edges.append((src[0], src[1], dst[0], dst[1]))


def _rotation_label(v: str, sig: Signature, flow: PFFlow) -> str:
    if v in sig.inputs or v in sig.outputs:
        return v
    return v if flow.future(sig, v) else f"{v}#r"


def compile_to_pf(g: GraphLikeDiagram, flow: PFFlow) -> tuple[PFDiagram, CompilationTrace]:
    """Run the compilation passes and return the PF diagram with its trace.

    Raises
    ------
    FlowInvalid
        If ``flow`` does not validate against the signature of ``g``.
    InternalArityError
        If the output is not a well-typed PF diagram.
    """
    sig = build_signature(g)
    problems = validate_pf_flow(sig, flow)
    if problems:
        raise FlowInvalid("; ".join(str(p) for p in problems))
    d = g.inner
    colour = {v: d.nodes[v].kind for v in d.nodes}
    attached = {w: n for w, n in d.inputs + d.outputs}
    for w, n in attached.items():
        colour[w] = _OTHER[colour[n]]
    b = _Builder()
    trace = CompilationTrace()

    # pass 0: endpoints become trivial opposite-colour rotations
    wires_in: list[tuple[str, str, int]] = []
    wires_out: list[tuple[str, str, int]] = []
    out_port: dict[tuple[str, str], tuple[str, int]] = {}
    in_port: dict[tuple[str, str], tuple[str, int]] = {}
    for w, n in d.inputs:
        b.add(w, _ROT_OF_COLOUR[colour[w]], Phase())
        wires_in.append((w, w, 0))
        out_port[(w, n)] = (w, 0)
    for w, n in d.outputs:
        b.add(w, _ROT_OF_COLOUR[colour[w]], Phase())
        wires_out.append((w, w, 0))
        in_port[(n, w)] = (w, 0)
    trace.steps.append(
        {
            "step": 0,
            "name": "orientation, inputs and outputs",
            "inserted": sorted(attached),
            "oriented": [[u, v] for v in sorted(d.nodes) for u in flow.past(sig, v)],
        }
    )

    # pass 1 (and the rotation half of pass 2): decomposition
    inserted: list[str] = []
    projections: list[str] = []
    for v in sorted(d.nodes):
        merge_op, rot_op, split_op, init_op, proj_op = _FAMILY[colour[v]]
        past = sorted(flow.past(sig, v), key=lambda u: (-flow.layers[u], u))
        fv = flow.f.get(v)
        if fv in past:
            past.remove(fv)
            past.insert(0, fv)
        future = sorted(flow.future(sig, v), key=lambda u: (flow.layers[u], u))
        rot = b.add(_rotation_label(v, sig, flow), rot_op, d.nodes[v].phase)
        if rot != v:
            inserted.append(rot)

        if not past:
            prep = b.add(f"{v}#p", init_op)
            inserted.append(prep)
            b.wire((prep, 0), (rot, 0))
        elif len(past) == 1:
            in_port[(past[0], v)] = (rot, 0)
            trace.paths[(past[0], v)] = []
        else:
            prev: tuple[str, int] | None = None
            trace.paths[(past[0], v)] = []
            for k, u in enumerate(past[1:]):
                m = b.add(f"{v}#m{k}", merge_op)
                inserted.append(m)
                if prev is None:
                    in_port[(past[0], v)] = (m, 0)
                else:
                    b.wire(prev, (m, 0))
                in_port[(u, v)] = (m, 1)
                trace.paths[(u, v)] = [m]
                prev = (m, 0)
            assert prev is not None
            b.wire(prev, (rot, 0))

        if not future:
            proj = b.add(v, proj_op)
            projections.append(proj)
            b.wire((rot, 0), (proj, 0))
        elif len(future) == 1:
            out_port[(v, future[0])] = (rot, 0)
        else:
            src = (rot, 0)
            for k, w in enumerate(future[:-1]):
                s = b.add(f"{v}#s{k}", split_op)
                inserted.append(s)
                b.wire(src, (s, 0))
                out_port[(v, w)] = (s, 0)
                src = (s, 1)
            out_port[(v, future[-1])] = src
    for (u, v), dst in sorted(in_port.items()):
        b.wire(out_port[(u, v)], dst)
    trace.steps.append({"step": 1, "name": "merge-split decomposition", "inserted": sorted(inserted)})
    trace.steps.append({"step": 2, "name": "projections", "inserted": sorted(projections)})

    # passes 3 and 4: corrections
    frames: dict[str, str] = {}

    def frame_for(t: str) -> str:
        if t in frames:
            return frames[t]
        label = b.add(f"{t}#f", _ROT_OF_COLOUR[_OTHER[colour[t]]], Phase())
        frames[t] = label
        if t in sig.outputs:
            wires_out[:] = [(w, label if n == t else n, p) for w, n, p in wires_out]
            b.wire((t, 0), (label, 0))
        else:
            wires_in[:] = [(w, label if n == t else n, p) for w, n, p in wires_in]
            b.wire((label, 0), (t, 0))
        return label

    def rotation_of(x: str) -> str:
        return _rotation_label(x, sig, flow)

    def push(bit: str, u: str, C: frozenset[str], touched: set[str]) -> None:
        for t in sorted(C - sig.pinned):
            b.S[rotation_of(t)] ^= {bit}
            touched.add(rotation_of(t))
            if t in sig.inputs or t in sig.outputs:
                fr = frame_for(t)
                b.T[fr] ^= {bit}
                touched.add(fr)
        for w in sorted(odd_neighborhood(sig, C) - {u}):
            b.T[rotation_of(w)] ^= {bit}
            touched.add(rotation_of(w))

    merge_touched: set[str] = set()
    for v in sorted(d.nodes):
        for u in flow.past(sig, v):
            if u == flow.f.get(v) or not trace.paths.get((u, v)):
                continue
            for m in trace.paths[(u, v)]:
                push(m, u, flow.correctors[(u, v)], merge_touched)
    trace.steps.append({"step": 3, "name": "merge correction", "modified": sorted(merge_touched)})

    proj_touched: set[str] = set()
    for v in projections:
        push(v, v, flow.correctors[(v, v)], proj_touched)
    trace.steps.append(
        {"step": 4, "name": "projector correction", "modified": sorted(proj_touched), "frames": sorted(frames.values())}
    )

    nodes = {}
    for label, node in b.nodes.items():
        if label in b.alpha:
            node = PFNode(label, node.op, ThetaAnnotation(b.alpha[label], frozenset(b.S[label]), frozenset(b.T[label])))
        nodes[label] = node
    bits = frozenset(label for label, node in nodes.items() if node.emits_bit)
    out = PFDiagram(nodes, tuple(b.edges), tuple(wires_in), tuple(wires_out), bits)
    problems = out.problems()
    if problems:
        raise InternalArityError("; ".join(problems))
    return out, trace


def trace_to_dict(trace: CompilationTrace) -> dict[str, Any]:
    return {
        "steps": trace.steps,
        "paths": [{"u": u, "v": v, "merges": ms} for (u, v), ms in sorted(trace.paths.items())],
    }


def save_trace(trace: CompilationTrace) -> str:
    return json.dumps(trace_to_dict(trace), indent=2) + "\n"
