"""Annotated Pauli Fusion diagrams.

A PF diagram is a directed string diagram over a fixed generator alphabet.
Rotations carry a classical-control annotation ``(alpha, S, T)`` that is
resolved against heralded bits into the angle::

    Theta = (prod_{v in S} (-1)^{s_v}) * alpha + sum_{w in T} s_w * pi

Merges and projections emit the bit named by their own label.
"""

from __future__ import annotations

import cmath
import json
import math
from collections import Counter
from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Any

from pfc.zx import H, X, Z, Phase, ZXDiagram, ZXNode, phase_to_json

__all__ = [
    "ThetaAnnotation",
    "PFNode",
    "PFDiagram",
    "PFFormatError",
    "MissingBit",
    "OPS",
    "ARITY",
    "EMITS_BIT",
    "theta",
    "theta_parts",
    "time_ordering",
    "dependency_cycle",
    "dependency_edges",
    "branch_diagram",
    "pf_load",
    "pf_save",
    "pf_to_dict",
    "pf_from_dict",
]

ARITY: dict[str, tuple[int, int]] = {
    "SplitV": (1, 2),
    "MergeV": (2, 1),
    "RotV": (1, 1),
    "SplitH": (1, 2),
    "MergeH": (2, 1),
    "RotH": (1, 1),
    "InitV": (0, 1),
    "InitH": (0, 1),
    "Had": (1, 1),
    "ProjV": (1, 0),
    "ProjH": (1, 0),
    "Swap": (2, 2),
}
OPS = tuple(ARITY)
EMITS_BIT = frozenset({"MergeV", "MergeH", "ProjV", "ProjH"})
ROTATIONS = frozenset({"RotV", "RotH"})

# spider colour of each generator's ZX picture: the V family lives in the
# X basis for merges/splits and rotates about Z, the H family is its dual
_SPIDER = {
    "SplitV": X,
    "MergeV": X,
    "RotV": Z,
    "InitV": Z,
    "ProjV": Z,
    "SplitH": Z,
    "MergeH": Z,
    "RotH": X,
    "InitH": X,
    "ProjH": X,
}
_OTHER = {Z: X, X: Z}
_S2 = 1 / math.sqrt(2)


class PFFormatError(ValueError):
    pass


class MissingBit(KeyError):
    """A bit referenced by an annotation has no assigned value."""

    def __init__(self, label: str) -> None:
        super().__init__(label)
        self.label = label

    def __str__(self) -> str:
        return f"no value for bit {self.label!r}"


@dataclass(frozen=True)
class ThetaAnnotation:
    alpha: Phase = Phase()
    S: frozenset[str] = frozenset()
    T: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", Phase.of(self.alpha))
        object.__setattr__(self, "S", frozenset(self.S))
        object.__setattr__(self, "T", frozenset(self.T))

    @property
    def bits(self) -> frozenset[str]:
        return self.S | self.T


def _bit(s: Mapping[str, int], label: str) -> int:
    try:
        value = s[label]
    except KeyError:
        raise MissingBit(label) from None
    if value not in (0, 1):
        raise ValueError(f"bit {label!r} has value {value!r}, expected 0 or 1")
    return int(value)


def theta_parts(a: ThetaAnnotation, s: Mapping[str, int]) -> tuple[int, int]:
    """``(sign, k)`` with ``Theta = sign * alpha + k * pi`` and ``k`` the unreduced count of set T-bits."""
    sign = 1
    for v in sorted(a.S):
        if _bit(s, v):
            sign = -sign
    k = sum(_bit(s, w) for w in sorted(a.T))
    return sign, k


def theta(a: ThetaAnnotation, s: Mapping[str, int]) -> Phase:
    """Resolve an annotation to its angle, reduced mod 2 pi.

    Raises
    ------
    MissingBit
        If a label in ``S`` or ``T`` is unassigned.
    """
    sign, k = theta_parts(a, s)
    base = a.alpha if sign > 0 else -a.alpha
    return base + Phase(k % 2)


@dataclass(frozen=True)
class PFNode:
    label: str
    op: str
    theta: ThetaAnnotation | None = None

    def __post_init__(self) -> None:
        if self.op not in ARITY:
            raise PFFormatError(f"node {self.label!r}: unknown op {self.op!r}")
        if self.op in ROTATIONS and self.theta is None:
            object.__setattr__(self, "theta", ThetaAnnotation())
        if self.op not in ROTATIONS and self.theta is not None:
            raise PFFormatError(f"node {self.label!r}: only rotations carry an annotation")

    @property
    def emits_bit(self) -> bool:
        return self.op in EMITS_BIT

    @property
    def arity(self) -> tuple[int, int]:
        return ARITY[self.op]


Port = tuple[str, int]


@dataclass(frozen=True)
class PFDiagram:
    """A PF diagram with explicit ports.

    Attributes
    ----------
    nodes : Mapping[str, PFNode]
    edges : tuple of (src, src_port, dst, dst_port)
        Directed wires from an output port to an input port.
    inputs : tuple of (wire, node, port)
        Open input wires feeding an input port.
    outputs : tuple of (wire, node, port)
        Open output wires leaving an output port.
    bits : frozenset of str
        The bit-label set; contains every merge and projection label and may
        name external bits that no node emits.
    """

    nodes: Mapping[str, PFNode] = field(default_factory=dict)
    edges: tuple[tuple[str, int, str, int], ...] = ()
    inputs: tuple[tuple[str, str, int], ...] = ()
    outputs: tuple[tuple[str, str, int], ...] = ()
    bits: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", dict(self.nodes))
        object.__setattr__(self, "edges", tuple(sorted((str(a), int(p), str(b), int(q)) for a, p, b, q in self.edges)))
        object.__setattr__(self, "inputs", tuple((str(w), str(n), int(p)) for w, n, p in self.inputs))
        object.__setattr__(self, "outputs", tuple((str(w), str(n), int(p)) for w, n, p in self.outputs))
        object.__setattr__(self, "bits", frozenset(self.bits))

    @property
    def emitting(self) -> frozenset[str]:
        return frozenset(label for label, n in self.nodes.items() if n.emits_bit)

    @property
    def internal_bits(self) -> frozenset[str]:
        """Bits with an emitting node: the branch-string domain."""
        return frozenset(b for b in self.bits if b in self.nodes)

    @property
    def external_bits(self) -> frozenset[str]:
        return frozenset(b for b in self.bits if b not in self.nodes)

    def problems(self) -> list[str]:
        """Every violated structural invariant (arity, port use, bit closure)."""
        out: list[str] = []
        for a, p, b, q in self.edges:
            for end in (a, b):
                if end not in self.nodes:
                    out.append(f"edge ({a}:{p} -> {b}:{q}) references unknown node {end!r}")
        for _, n, _ in self.inputs + self.outputs:
            if n not in self.nodes:
                out.append(f"wire attached to unknown node {n!r}")
        fed = [(b, q) for _, _, b, q in self.edges] + [(n, p) for _, n, p in self.inputs]
        driven = [(a, p) for a, p, _, _ in self.edges] + [(n, p) for _, n, p in self.outputs]
        for port, k in sorted(Counter(fed).items()):
            if k > 1:
                out.append(f"input port {port[0]}:{port[1]} is fed more than once")
        for port, k in sorted(Counter(driven).items()):
            if k > 1:
                out.append(f"output port {port[0]}:{port[1]} is used more than once")
        used_in, used_out = set(fed), set(driven)
        wires = Counter([w for w, _, _ in self.inputs] + [w for w, _, _ in self.outputs])
        for w in sorted(w for w, k in wires.items() if k > 1):
            out.append(f"wire id {w!r} is used more than once")
        for label, node in self.nodes.items():
            if label != node.label:
                out.append(f"node keyed {label!r} carries label {node.label!r}")
            nin, nout = node.arity
            for port in {q for (n, q) in used_in if n == label} - set(range(nin)):
                out.append(f"{node.op} node {label!r} has {nin} inputs but port {port} is wired")
            for port in {q for (n, q) in used_out if n == label} - set(range(nout)):
                out.append(f"{node.op} node {label!r} has {nout} outputs but port {port} is wired")
            for q in range(nin):
                if (label, q) not in used_in:
                    out.append(f"{node.op} node {label!r} input port {q} is unconnected")
            for q in range(nout):
                if (label, q) not in used_out:
                    out.append(f"{node.op} node {label!r} output port {q} is unconnected")
        for label in sorted(self.emitting - self.bits):
            out.append(f"bit-emitting node {label!r} is missing from the bit set")
        for label in sorted(self.bits & set(self.nodes)):
            if not self.nodes[label].emits_bit:
                out.append(f"bit {label!r} names a node that emits no bit")
        for label, node in sorted(self.nodes.items()):
            if node.theta is not None:
                for b in sorted(node.theta.bits - self.bits):
                    out.append(f"annotation of {label!r} references undeclared bit {b!r}")
        return out


# -- runnability ----------------------------------------------------------------


def dependency_edges(d: PFDiagram) -> list[tuple[str, str, str]]:
    """Wire edges plus classical-control edges ``bit -> rotation``, tagged by kind."""
    out = [(a, b, "wire") for a, _, b, _ in d.edges]
    for label, node in sorted(d.nodes.items()):
        if node.theta is not None:
            for b in sorted(node.theta.bits):
                if b in d.nodes:
                    out.append((b, label, "control"))
    return out


def time_ordering(d: PFDiagram) -> dict[str, int] | None:
    """Longest-path layering of the dependency graph, sources at 1; ``None`` on a cycle."""
    succ: dict[str, list[str]] = {label: [] for label in d.nodes}
    indeg = {label: 0 for label in d.nodes}
    for a, b, _ in dependency_edges(d):
        succ[a].append(b)
        indeg[b] += 1
    t = {label: 1 for label in d.nodes}
    ready = sorted(label for label, k in indeg.items() if k == 0)
    seen = 0
    while ready:
        nxt = []
        for a in ready:
            seen += 1
            for b in succ[a]:
                t[b] = max(t[b], t[a] + 1)
                indeg[b] -= 1
                if indeg[b] == 0:
                    nxt.append(b)
        ready = sorted(nxt)
    return t if seen == len(d.nodes) else None


def dependency_cycle(d: PFDiagram) -> list[tuple[str, str, str]] | None:
    """One dependency cycle as a list of tagged edges, or ``None`` if acyclic."""
    succ: dict[str, list[tuple[str, str]]] = {label: [] for label in d.nodes}
    for a, b, kind in dependency_edges(d):
        succ[a].append((b, kind))
    colour = {label: 0 for label in d.nodes}
    stack_edges: list[tuple[str, str, str]] = []

    def visit(a: str) -> list[tuple[str, str, str]] | None:
        colour[a] = 1
        for b, kind in succ[a]:
            stack_edges.append((a, b, kind))
            if colour[b] == 1:
                start = next(i for i, e in enumerate(stack_edges) if e[0] == b)
                return stack_edges[start:]
            if colour[b] == 0:
                found = visit(b)
                if found:
                    return found
            stack_edges.pop()
        colour[a] = 2
        return None

    for label in sorted(d.nodes):
        if colour[label] == 0:
            found = visit(label)
            if found:
                return found
    return None


# -- branch pictures --------------------------------------------------------------


class _Renderer:
    def __init__(self, d: PFDiagram) -> None:
        self.nodes: dict[str, ZXNode] = {}
        self.edges: list[tuple[str, str]] = []
        self.scalar = 1.0 + 0j
        self.taken = set(d.nodes)
        self.in_end: dict[Port, str] = {}
        self.out_end: dict[Port, str] = {}

    def fresh(self, base: str) -> str:
        name, k = base, 0
        while name in self.taken:
            k += 1
            name = f"{base}{k}"
        self.taken.add(name)
        return name

    def spider(self, label: str, kind: str, phase: Phase = Phase()) -> str:
        self.nodes[label] = ZXNode(label, kind, phase)
        return label


def _render_node(r: _Renderer, node: PFNode, s: Mapping[str, int]) -> None:
    label, op = node.label, node.op
    if op in ("MergeV", "MergeH"):
        x = _bit(s, label)
        body = r.spider(label, _SPIDER[op])
        # outcome 1 differs by a pi dot of the other colour on the second input
        dot = r.spider(r.fresh(f"{label}~dot"), _OTHER[_SPIDER[op]], Phase(x))
        r.edges.append((dot, body))
        r.in_end[(label, 0)] = body
        r.in_end[(label, 1)] = dot
        r.out_end[(label, 0)] = body
    elif op in ("SplitV", "SplitH"):
        body = r.spider(label, _SPIDER[op])
        r.in_end[(label, 0)] = body
        r.out_end[(label, 0)] = body
        r.out_end[(label, 1)] = body
    elif op in ("RotV", "RotH"):
        assert node.theta is not None
        sign, k = theta_parts(node.theta, s)
        signed = node.theta.alpha.radians * sign
        body = r.spider(label, _SPIDER[op], theta(node.theta, s))
        # exp(-i sign*alpha/2) makes the picture the rotation by sign*alpha
        # followed by k Pauli flips, so sign changes and pi shifts act exactly
        r.scalar *= cmath.exp(-0.5j * signed)
        r.in_end[(label, 0)] = body
        r.out_end[(label, 0)] = body
    elif op in ("InitV", "InitH"):
        body = r.spider(label, _SPIDER[op])
        r.scalar *= _S2
        r.out_end[(label, 0)] = body
    elif op in ("ProjV", "ProjH"):
        body = r.spider(label, _SPIDER[op], Phase(_bit(s, label)))
        r.scalar *= _S2
        r.in_end[(label, 0)] = body
    elif op == "Had":
        body = r.spider(label, H)
        r.in_end[(label, 0)] = body
        r.out_end[(label, 0)] = body
    elif op == "Swap":
        first = r.spider(label, Z)
        second = r.spider(r.fresh(f"{label}~x"), Z)
        r.in_end[(label, 0)] = first
        r.out_end[(label, 1)] = first
        r.in_end[(label, 1)] = second
        r.out_end[(label, 0)] = second
    else:  # pragma: no cover - ARITY guards the alphabet
        raise PFFormatError(f"unknown op {op!r}")


def branch_diagram(
    d: PFDiagram,
    x: Mapping[str, int] | None = None,
    r: Mapping[str, int] | None = None,
) -> ZXDiagram:
    """The plain ZX diagram ``D(x)`` with every bit substituted.

    Each generator becomes a ZX picture whose matrix equals its Kraus
    operator for the given outcome (rotations up to a per-node phase fixed by
    the sign and shift of the annotation). Node count does not depend on ``x``.

    Parameters
    ----------
    x : mapping
        Values of bits emitted inside ``d``.
    r : mapping, optional
        Values of external bits.
    """
    values: dict[str, int] = dict(r or {})
    values.update(x or {})
    ren = _Renderer(d)
    for label in sorted(d.nodes):
        _render_node(ren, d.nodes[label], values)
    for a, p, b, q in d.edges:
        ren.edges.append((ren.out_end[(a, p)], ren.in_end[(b, q)]))
    inputs = [(w, ren.in_end[(n, p)]) for w, n, p in d.inputs]
    outputs = [(w, ren.out_end[(n, p)]) for w, n, p in d.outputs]
    return ZXDiagram(ren.nodes, tuple(ren.edges), tuple(inputs), tuple(outputs), ren.scalar)


# -- serialisation --------------------------------------------------------------


def pf_to_dict(d: PFDiagram) -> dict[str, Any]:
    nodes = []
    for label in sorted(d.nodes):
        node = d.nodes[label]
        entry: dict[str, Any] = {"id": label, "op": node.op}
        if node.theta is not None:
            entry["theta"] = {
                "alpha": phase_to_json(node.theta.alpha),
                "S": sorted(node.theta.S),
                "T": sorted(node.theta.T),
            }
        nodes.append(entry)
    return {
        "nodes": nodes,
        "edges": [[a, p, b, q] for a, p, b, q in d.edges],
        "inputs": [{"wire": w, "node": n, "port": p} for w, n, p in d.inputs],
        "outputs": [{"wire": w, "node": n, "port": p} for w, n, p in d.outputs],
        "bits": sorted(d.bits),
    }


def _phase(obj: Any, where: str) -> Phase:
    from pfc.zx import ZXFormatError, _phase_from_json

    try:
        return _phase_from_json(obj, where)
    except ZXFormatError as exc:
        raise PFFormatError(str(exc)) from None


def _strings(obj: Any, where: str) -> list[str]:
    if not isinstance(obj, list) or not all(isinstance(v, str) for v in obj):
        raise PFFormatError(f"{where}: expected a list of strings")
    return obj


def pf_from_dict(data: Any) -> PFDiagram:
    if not isinstance(data, Mapping):
        raise PFFormatError("top level: expected a JSON object")
    nodes: dict[str, PFNode] = {}
    for i, raw in enumerate(data.get("nodes", [])):
        where = f"nodes[{i}]"
        if not isinstance(raw, Mapping) or "id" not in raw or "op" not in raw:
            raise PFFormatError(f"{where}: node needs 'id' and 'op'")
        label, op = str(raw["id"]), raw["op"]
        if op not in ARITY:
            raise PFFormatError(f"{where}: unknown op {op!r}")
        if label in nodes:
            raise PFFormatError(f"{where}: duplicate node id {label!r}")
        ann = None
        if "theta" in raw:
            t = raw["theta"]
            if not isinstance(t, Mapping):
                raise PFFormatError(f"{where}.theta: expected an object")
            ann = ThetaAnnotation(
                _phase(t.get("alpha", {"num": 0, "den": 1}), f"{where}.theta.alpha"),
                frozenset(_strings(t.get("S", []), f"{where}.theta.S")),
                frozenset(_strings(t.get("T", []), f"{where}.theta.T")),
            )
        try:
            nodes[label] = PFNode(label, op, ann)
        except PFFormatError as exc:
            raise PFFormatError(f"{where}: {exc}") from None
    edges = []
    for i, raw in enumerate(data.get("edges", [])):
        if (
            not isinstance(raw, list)
            or len(raw) != 4
            or not isinstance(raw[0], str)
            or not isinstance(raw[2], str)
            or not all(isinstance(raw[k], int) and not isinstance(raw[k], bool) for k in (1, 3))
        ):
            raise PFFormatError(f"edges[{i}]: expected [src, src_port, dst, dst_port]")
        edges.append(tuple(raw))

    def wires(key: str) -> list[tuple[str, str, int]]:
        out = []
        for i, raw in enumerate(data.get(key, [])):
            if not isinstance(raw, Mapping) or not {"wire", "node"} <= set(raw):
                raise PFFormatError(f"{key}[{i}]: needs 'wire', 'node' and optional 'port'")
            out.append((str(raw["wire"]), str(raw["node"]), int(raw.get("port", 0))))
        return out

    bits = frozenset(_strings(data.get("bits", []), "bits"))
    d = PFDiagram(nodes, tuple(edges), tuple(wires("inputs")), tuple(wires("outputs")), bits)
    problems = d.problems()
    if problems:
        raise PFFormatError("; ".join(problems))
    return d


def pf_load(text: str) -> PFDiagram:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PFFormatError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return pf_from_dict(data)


def pf_save(d: PFDiagram) -> str:
    return json.dumps(pf_to_dict(d), indent=2) + "\n"

