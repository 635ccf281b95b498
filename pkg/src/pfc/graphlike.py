"""Graph-like normalisation and signatures.

Normal form: no Hadamard boxes, only Z-X adjacencies, no parallel edges, no
self-loops, every open wire on a spider. The global scalar is carried along
exactly for every rewrite used here, so ``eval_zx`` of the result equals that
of the input up to float round-off.
"""

from __future__ import annotations

import cmath
import json
import math
from collections import Counter
from collections.abc import Iterable
from dataclasses import dataclass, field
from typing import Any

from pfc.zx import H, X, Z, Phase, ZXDiagram, ZXNode, validate

__all__ = [
    "GraphLikeDiagram",
    "Signature",
    "ZeroDiagram",
    "NotGraphLike",
    "to_graph_like",
    "is_graph_like",
    "graph_like_violations",
    "build_signature",
    "signature_to_dict",
    "save_signature",
]

# H = e^{-i pi/4} Z(pi/2) X(pi/2) Z(pi/2) for unnormalised spiders
_EULER_SCALAR = cmath.exp(-0.25j * math.pi)
# a Z-X pair joined by two parallel edges equals the disconnected pair times 1/2
_HOPF_SCALAR = 0.5
_HALF_PI = Phase(1, 2)


class ZeroDiagram(ValueError):
    """The diagram denotes the zero map, so proportionality checks are meaningless."""


class NotGraphLike(ValueError):
    pass


def graph_like_violations(d: ZXDiagram) -> list[str]:
    problems = []
    counts = Counter(d.edges)
    for label, node in d.nodes.items():
        if node.kind == H:
            problems.append(f"Hadamard node {label!r}")
    for (a, b), k in counts.items():
        if a == b:
            problems.append(f"self-loop on {a!r}")
            continue
        if k > 1:
            problems.append(f"{k} parallel edges between {a!r} and {b!r}")
        if a in d.nodes and b in d.nodes and d.nodes[a].kind == d.nodes[b].kind:
            problems.append(f"same-colour edge {a!r}-{b!r}")
    for wire, node in d.inputs + d.outputs:
        if node in d.nodes and d.nodes[node].kind == H:
            problems.append(f"wire {wire!r} attached to a Hadamard node")
    return problems


def is_graph_like(d: ZXDiagram) -> bool:
    return not graph_like_violations(d) and not validate(d)


@dataclass(frozen=True)
class GraphLikeDiagram:
    """A ZX diagram certified to be in graph-like form."""

    inner: ZXDiagram

    def __post_init__(self) -> None:
        problems = validate(self.inner) + graph_like_violations(self.inner)
        if problems:
            raise NotGraphLike("; ".join(problems))

    @property
    def nodes(self):
        return self.inner.nodes


class _Graph:
    """Mutable working copy used by the rewrite loop."""

    def __init__(self, d: ZXDiagram) -> None:
        self.kind = {label: n.kind for label, n in d.nodes.items()}
        self.phase = {label: n.phase for label, n in d.nodes.items()}
        self.edges: Counter = Counter(d.edges)
        self.inputs = list(d.inputs)
        self.outputs = list(d.outputs)
        self.scalar = d.scalar
        self.taken = set(d.nodes) | set(d.wire_ids)

    def fresh(self, prefix: str) -> str:
        k = 0
        while f"{prefix}{k}" in self.taken:
            k += 1
        self.taken.add(f"{prefix}{k}")
        return f"{prefix}{k}"

    def add(self, label: str, kind: str, phase: Phase = Phase()) -> None:
        self.kind[label] = kind
        self.phase[label] = phase

    def link(self, a: str, b: str, k: int = 1) -> None:
        self.edges[(a, b) if a <= b else (b, a)] += k

    def incident(self, label: str) -> list[tuple[str, str]]:
        return [e for e in self.edges if label in e]

    def neighbours(self, label: str) -> list[str]:
        out = []
        for (a, b), k in self.edges.items():
            if a == label and b == label:
                out += [a] * (2 * k)
            elif a == label:
                out += [b] * k
            elif b == label:
                out += [a] * k
        return out

    def wires_on(self, label: str) -> int:
        return sum(n == label for _, n in self.inputs + self.outputs)

    def remove(self, label: str) -> None:
        for e in self.incident(label):
            del self.edges[e]
        del self.kind[label]
        del self.phase[label]

    def freeze(self) -> ZXDiagram:
        nodes = {label: ZXNode(label, self.kind[label], self.phase[label]) for label in self.kind}
        edges = [e for e, k in sorted(self.edges.items()) for _ in range(k)]
        return ZXDiagram(nodes, tuple(edges), tuple(self.inputs), tuple(self.outputs), self.scalar)


def _cap_wires(g: _Graph) -> None:
    for wires in (g.inputs, g.outputs):
        for i, (wire, node) in enumerate(wires):
            if g.kind[node] == H:
                cap = g.fresh("_c")
                g.add(cap, Z)
                g.link(cap, node)
                wires[i] = (wire, cap)


def _decompose_hadamards(g: _Graph) -> None:
    for h in sorted(label for label, kind in g.kind.items() if kind == H):
        ends = g.neighbours(h)
        if len(ends) != 2:
            raise ValueError(f"Hadamard node {h!r} has degree {len(ends)}")
        g.remove(h)
        a, b, c = g.fresh("_e"), g.fresh("_e"), g.fresh("_e")
        g.add(a, Z, _HALF_PI)
        g.add(b, X, _HALF_PI)
        g.add(c, Z, _HALF_PI)
        # a Hadamard self-loop has both ends on h itself: close the chain into a ring
        first, second = ends
        g.link(first if first != h else c, a)
        g.link(a, b)
        g.link(b, c)
        g.link(c, second if second != h else a)
        g.scalar *= _EULER_SCALAR


def _fuse_once(g: _Graph) -> bool:
    for (a, b) in sorted(g.edges):
        if a != b and g.kind[a] == g.kind[b] and g.kind[a] != H:
            keep, gone = (a, b) if a < b else (b, a)
            joined = g.edges[(a, b)]
            g.phase[keep] = g.phase[keep] + g.phase[gone]
            for e in g.incident(gone):
                k = g.edges[e]
                other = e[0] if e[1] == gone else e[1]
                if other == gone:
                    g.link(keep, keep, k)
                elif other != keep:
                    g.link(keep, other, k)
            del g.edges[(a, b)]
            if joined > 1:
                g.link(keep, keep, joined - 1)
            g.remove(gone)
            g.inputs = [(w, keep if n == gone else n) for w, n in g.inputs]
            g.outputs = [(w, keep if n == gone else n) for w, n in g.outputs]
            return True
    return False


def _drop_loops_and_pairs(g: _Graph) -> bool:
    changed = False
    for (a, b), k in sorted(g.edges.items()):
        if a == b:
            # tracing two legs of a spider leaves the same spider: no scalar
            del g.edges[(a, b)]
            changed = True
        elif k > 1 and g.kind[a] != g.kind[b]:
            g.edges[(a, b)] = k % 2
            if g.edges[(a, b)] == 0:
                del g.edges[(a, b)]
            g.scalar *= _HOPF_SCALAR ** (k // 2)
            changed = True
    return changed


def _components(g: _Graph) -> list[set[str]]:
    adj: dict[str, set[str]] = {label: set() for label in g.kind}
    for a, b in g.edges:
        adj[a].add(b)
        adj[b].add(a)
    seen: set[str] = set()
    out = []
    for start in sorted(adj):
        if start in seen:
            continue
        comp, stack = set(), [start]
        while stack:
            x = stack.pop()
            if x in comp:
                continue
            comp.add(x)
            stack.extend(adj[x] - comp)
        seen |= comp
        out.append(comp)
    return out


def _fold_closed_components(g: _Graph, width_cap: int) -> bool:
    from pfc.semantics.dense import WidthExceeded, eval_zx

    wired = {n for _, n in g.inputs + g.outputs}
    changed = False
    for comp in _components(g):
        if comp & wired:
            continue
        sub = ZXDiagram(
            {label: ZXNode(label, g.kind[label], g.phase[label]) for label in comp},
            tuple(e for e, k in g.edges.items() if e[0] in comp for _ in range(k)),
        )
        try:
            value = complex(eval_zx(sub, width_cap=width_cap).matrix[0, 0])
        except WidthExceeded:
            continue
        if abs(value) < 1e-12:
            raise ZeroDiagram(f"closed component {sorted(comp)} evaluates to zero")
        g.scalar *= value
        for label in comp:
            g.remove(label)
        changed = True
    return changed


def to_graph_like(d: ZXDiagram, width_cap: int = 12) -> GraphLikeDiagram:
    """Rewrite ``d`` into graph-like form, tracking the scalar.

    Hadamards become Euler chains ``Z(pi/2) X(pi/2) Z(pi/2)``; same-colour
    neighbours fuse (keeping the smaller label); plain self-loops vanish and
    Z-X parallel pairs cancel (Hopf). Closed components are evaluated and
    folded into the scalar.

    Raises
    ------
    ZeroDiagram
        If a closed component, and hence the whole map, is zero.
    """
    problems = validate(d)
    if problems:
        raise ValueError("invalid diagram: " + "; ".join(problems))
    g = _Graph(d)
    _cap_wires(g)
    _decompose_hadamards(g)
    budget = 10 * max(len(g.kind), 1) + 10
    steps = 0
    while True:
        progressed = False
        while _fuse_once(g):
            progressed = True
            steps += 1
            if steps > budget:
                raise RuntimeError("graph-like normalisation exceeded its step budget")
        if _drop_loops_and_pairs(g):
            progressed = True
            steps += 1
        if not progressed:
            break
        if steps > budget:
            raise RuntimeError("graph-like normalisation exceeded its step budget")
    _fold_closed_components(g, width_cap)
    if abs(g.scalar) == 0:
        raise ZeroDiagram("global scalar is zero")
    return GraphLikeDiagram(g.freeze())


# -- signatures ---------------------------------------------------------------


@dataclass(frozen=True)
class Signature:
    """The signature graph of a graph-like diagram.

    ``vertices`` is the canonical (sorted) vertex order; ``adjacency`` maps each
    vertex to its neighbours, excluding itself; ``loops`` are the vertices
    carrying a self-loop (phase an odd multiple of pi/2).
    """

    vertices: tuple[str, ...]
    adjacency: dict[str, frozenset[str]]
    inputs: frozenset[str]
    outputs: frozenset[str]
    pinned: frozenset[str]
    loops: frozenset[str]
    origin: GraphLikeDiagram | None = field(default=None, compare=False, repr=False)

    @property
    def diagram_vertices(self) -> tuple[str, ...]:
        return tuple(v for v in self.vertices if v not in self.inputs and v not in self.outputs)

    def neighbors(self, v: str) -> frozenset[str]:
        return self.adjacency[v]

    @property
    def edges(self) -> list[tuple[str, str]]:
        out = set()
        for v, ns in self.adjacency.items():
            for u in ns:
                out.add((v, u) if v < u else (u, v))
        return sorted(out)

    @classmethod
    def from_graph(
        cls,
        edges: Iterable[tuple[str, str]],
        inputs: Iterable[str] = (),
        outputs: Iterable[str] = (),
        pinned: Iterable[str] = (),
        loops: Iterable[str] = (),
        vertices: Iterable[str] = (),
    ) -> Signature:
        """Build a signature directly from graph data (used by tests and oracles)."""
        adj: dict[str, set[str]] = {v: set() for v in vertices}
        for a, b in edges:
            adj.setdefault(a, set())
            adj.setdefault(b, set())
            if a != b:
                adj[a].add(b)
                adj[b].add(a)
        for v in list(inputs) + list(outputs) + list(pinned) + list(loops):
            adj.setdefault(v, set())
        return cls(
            tuple(sorted(adj)),
            {v: frozenset(ns) for v, ns in adj.items()},
            frozenset(inputs),
            frozenset(outputs),
            frozenset(pinned),
            frozenset(loops),
        )


def build_signature(g: GraphLikeDiagram) -> Signature:
    """Attach a degree-1 endpoint per open wire (named by wire id) and mark loops and pinned vertices."""
    d = g.inner
    adj: dict[str, set[str]] = {label: set() for label in d.nodes}
    for a, b in d.edges:
        adj[a].add(b)
        adj[b].add(a)
    inputs, outputs = set(), set()
    for wires, bucket in ((d.inputs, inputs), (d.outputs, outputs)):
        for wire, node in wires:
            if wire in adj:
                raise ValueError(f"wire id {wire!r} collides with a vertex label")
            adj[wire] = {node}
            adj[node].add(wire)
            bucket.add(wire)
    pinned = {label for label, n in d.nodes.items() if n.phase.is_multiple_of_half_pi()}
    loops = {label for label, n in d.nodes.items() if n.phase.is_odd_multiple_of_half_pi()}
    return Signature(
        tuple(sorted(adj)),
        {v: frozenset(ns) for v, ns in adj.items()},
        frozenset(inputs),
        frozenset(outputs),
        frozenset(pinned),
        frozenset(loops),
        g,
    )


def signature_to_dict(sig: Signature) -> dict[str, Any]:
    return {
        "vertices": [
            {
                "id": v,
                "in_I": v in sig.inputs,
                "in_O": v in sig.outputs,
                "in_P": v in sig.pinned,
                "self_loop": v in sig.loops,
            }
            for v in sig.vertices
        ],
        "edges": [list(e) for e in sig.edges],
    }


def save_signature(sig: Signature) -> str:
    return json.dumps(signature_to_dict(sig), indent=2) + "\n"


def load_signature(text: str) -> Signature:
    data = json.loads(text)
    verts = data["vertices"]
    return Signature.from_graph(
        [tuple(e) for e in data["edges"]],
        inputs=[v["id"] for v in verts if v["in_I"]],
        outputs=[v["id"] for v in verts if v["in_O"]],
        pinned=[v["id"] for v in verts if v["in_P"]],
        loops=[v["id"] for v in verts if v["self_loop"]],
        vertices=[v["id"] for v in verts],
    )
