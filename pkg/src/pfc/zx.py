"""Labelled ZX diagrams with exact rational phases.

A diagram is an undirected multigraph of Z spiders, X spiders and Hadamard
boxes. Open wires are listed explicitly as inputs or outputs, in order; the
order fixes the tensor-index convention of the evaluator (first listed wire is
the most significant qubit).
"""

from __future__ import annotations

import json
import math
from collections import Counter
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

__all__ = [
    "Phase",
    "ZXNode",
    "ZXDiagram",
    "ZXFormatError",
    "validate",
    "load",
    "save",
    "Z",
    "X",
    "H",
]

Z = "Z"
X = "X"
H = "H"
KINDS = (Z, X, H)


@dataclass(frozen=True, order=True)
class Phase:
    """An angle ``num/den * pi``, kept reduced with ``num`` in ``[0, 2*den)``."""

    num: int = 0
    den: int = 1

    def __post_init__(self) -> None:
        if self.den == 0:
            raise ZeroDivisionError("phase denominator is zero")
        frac = Fraction(self.num, self.den) % 2
        object.__setattr__(self, "num", frac.numerator)
        object.__setattr__(self, "den", frac.denominator)

    @classmethod
    def of(cls, value: Phase | Fraction | int | str) -> Phase:
        """Coerce a fraction of pi (``Fraction(1, 4)``, ``"1/4"``, ``1``) to a phase."""
        if isinstance(value, Phase):
            return value
        frac = Fraction(value)
        return cls(frac.numerator, frac.denominator)

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.num, self.den)

    def __add__(self, other: Phase) -> Phase:
        return Phase.of(self.fraction + Phase.of(other).fraction)

    def __sub__(self, other: Phase) -> Phase:
        return Phase.of(self.fraction - Phase.of(other).fraction)

    def __neg__(self) -> Phase:
        return Phase.of(-self.fraction)

    def __float__(self) -> float:
        return self.radians

    @property
    def radians(self) -> float:
        return math.pi * self.num / self.den

    def is_zero(self) -> bool:
        return self.num == 0

    def is_multiple_of_pi(self) -> bool:
        return self.den == 1

    def is_multiple_of_half_pi(self) -> bool:
        return self.den in (1, 2)

    def is_odd_multiple_of_half_pi(self) -> bool:
        return self.den == 2

    def __repr__(self) -> str:
        return f"Phase({self.num}/{self.den})"

    def __str__(self) -> str:
        if self.num == 0:
            return "0"
        head = "" if self.num == 1 else str(self.num)
        return f"{head}pi" if self.den == 1 else f"{head}pi/{self.den}"


@dataclass(frozen=True)
class ZXNode:
    label: str
    kind: str
    phase: Phase = Phase()

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown node kind {self.kind!r}")
        if not isinstance(self.phase, Phase):
            object.__setattr__(self, "phase", Phase.of(self.phase))

    @property
    def is_spider(self) -> bool:
        return self.kind != H


def _edge(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class ZXDiagram:
    """An immutable labelled ZX diagram.

    Attributes
    ----------
    nodes : Mapping[str, ZXNode]
        Nodes keyed by label.
    edges : tuple of (str, str)
        Multiset of undirected edges, each stored with sorted endpoints.
        Self-pairs are self-loops.
    inputs, outputs : tuple of (wire id, node label)
        Ordered open wires.
    scalar : complex
        Global factor multiplying the interpretation.
    """

    nodes: Mapping[str, ZXNode] = field(default_factory=dict)
    edges: tuple[tuple[str, str], ...] = ()
    inputs: tuple[tuple[str, str], ...] = ()
    outputs: tuple[tuple[str, str], ...] = ()
    scalar: complex = 1.0 + 0.0j

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", dict(self.nodes))
        object.__setattr__(self, "edges", tuple(sorted(_edge(*e) for e in self.edges)))
        object.__setattr__(self, "inputs", tuple((str(w), str(n)) for w, n in self.inputs))
        object.__setattr__(self, "outputs", tuple((str(w), str(n)) for w, n in self.outputs))
        object.__setattr__(self, "scalar", complex(self.scalar))

    @classmethod
    def build(
        cls,
        nodes: Iterable[tuple[str, str] | tuple[str, str, Any] | ZXNode],
        edges: Iterable[tuple[str, str]] = (),
        inputs: Iterable[tuple[str, str]] = (),
        outputs: Iterable[tuple[str, str]] = (),
        scalar: complex = 1.0,
    ) -> ZXDiagram:
        """Convenience constructor: nodes as ``(label, kind[, phase])`` tuples."""
        table = {}
        for spec in nodes:
            node = spec if isinstance(spec, ZXNode) else ZXNode(spec[0], spec[1], Phase.of(spec[2]) if len(spec) > 2 else Phase())
            table[node.label] = node
        return cls(table, tuple(edges), tuple(inputs), tuple(outputs), scalar)

    @property
    def wire_ids(self) -> list[str]:
        return [w for w, _ in self.inputs] + [w for w, _ in self.outputs]

    def degree(self, label: str) -> int:
        deg = 0
        for a, b in self.edges:
            deg += (a == label) + (b == label)
        deg += sum(n == label for _, n in self.inputs)
        deg += sum(n == label for _, n in self.outputs)
        return deg

    def neighbors(self, label: str) -> list[str]:
        """Neighbours with multiplicity, self-loops listed twice."""
        out = []
        for a, b in self.edges:
            if a == label:
                out.append(b)
            if b == label:
                out.append(a)
        return out

    def edge_counts(self) -> Counter:
        return Counter(self.edges)

    def replace(self, **changes: Any) -> ZXDiagram:
        data = {
            "nodes": self.nodes,
            "edges": self.edges,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "scalar": self.scalar,
        }
        data.update(changes)
        return ZXDiagram(**data)


class ZXFormatError(ValueError):
    """Raised for malformed ``.zx.json`` input; the message names the offending field."""


def validate(d: ZXDiagram) -> list[str]:
    """Return every invariant violation in ``d``; an empty list means valid."""
    problems: list[str] = []
    for label, node in d.nodes.items():
        if not label:
            problems.append("empty node label")
        if label != node.label:
            problems.append(f"node keyed {label!r} carries label {node.label!r}")
        if node.kind == H and not node.phase.is_zero():
            problems.append(f"Hadamard node {label!r} has non-zero phase {node.phase}")
    for a, b in d.edges:
        for end in (a, b):
            if end not in d.nodes:
                problems.append(f"edge ({a!r}, {b!r}) references unknown node {end!r}")
    seen: set[str] = set()
    for side, wires in (("input", d.inputs), ("output", d.outputs)):
        for wire, node in wires:
            if wire in seen:
                problems.append(f"wire id {wire!r} is used more than once")
            seen.add(wire)
            if node not in d.nodes:
                problems.append(f"dangling {side} wire {wire!r}: attached node {node!r} does not exist")
    for label, node in d.nodes.items():
        if node.kind == H:
            deg = d.degree(label)
            if deg != 2:
                problems.append(f"Hadamard node {label!r} has degree {deg}, expected 2")
    return problems


# -- serialization ------------------------------------------------------------


def _phase_from_json(obj: Any, where: str) -> Phase:
    if not isinstance(obj, Mapping) or set(obj) - {"num", "den"} or "num" not in obj:
        raise ZXFormatError(f"{where}: phase must be an object with 'num' and 'den'")
    num, den = obj["num"], obj.get("den", 1)
    if not isinstance(num, int) or not isinstance(den, int) or isinstance(num, bool) or isinstance(den, bool):
        raise ZXFormatError(f"{where}: phase num/den must be integers")
    if den <= 0:
        raise ZXFormatError(f"{where}: phase denominator must be positive, got {den}")
    if math.gcd(num, den) != 1 and not (num == 0 and den == 1):
        raise ZXFormatError(f"{where}: phase {num}/{den} is not reduced")
    return Phase(num, den)


def phase_to_json(p: Phase) -> dict[str, int]:
    return {"num": p.num, "den": p.den}


def _fresh(prefix: str, taken: set[str]) -> str:
    k = 0
    while f"{prefix}{k}" in taken:
        k += 1
    taken.add(f"{prefix}{k}")
    return f"{prefix}{k}"


def from_dict(data: Any) -> ZXDiagram:
    if not isinstance(data, Mapping):
        raise ZXFormatError("top level: expected a JSON object")
    nodes: dict[str, ZXNode] = {}
    for i, raw in enumerate(data.get("nodes", [])):
        where = f"nodes[{i}]"
        if not isinstance(raw, Mapping) or "id" not in raw or "kind" not in raw:
            raise ZXFormatError(f"{where}: node needs 'id' and 'kind'")
        label, kind = str(raw["id"]), raw["kind"]
        if kind not in KINDS:
            raise ZXFormatError(f"{where}: unknown node kind {kind!r}")
        if label in nodes:
            raise ZXFormatError(f"{where}: duplicate node id {label!r}")
        phase = _phase_from_json(raw["phase"], f"{where}.phase") if "phase" in raw else Phase()
        if kind == H and not phase.is_zero():
            raise ZXFormatError(f"{where}: Hadamard node cannot carry a phase")
        nodes[label] = ZXNode(label, kind, phase)

    taken = set(nodes)
    edges: list[tuple[str, str]] = []
    for i, raw in enumerate(data.get("edges", [])):
        where = f"edges[{i}]"
        if not isinstance(raw, list) or len(raw) not in (2, 3):
            raise ZXFormatError(f"{where}: edge must be [a, b] or [a, b, \"h\"]")
        a, b = str(raw[0]), str(raw[1])
        for end in (a, b):
            if end not in nodes:
                raise ZXFormatError(f"{where}: unknown node {end!r}")
        if len(raw) == 3:
            if raw[2] != "h":
                raise ZXFormatError(f"{where}: unknown edge tag {raw[2]!r}")
            h = _fresh("_h", taken)
            nodes[h] = ZXNode(h, H)
            edges += [(a, h), (h, b)]
        else:
            edges.append((a, b))

    def wires(key: str) -> list[tuple[str, str]]:
        out = []
        for i, raw in enumerate(data.get(key, [])):
            if not isinstance(raw, Mapping) or "wire" not in raw or "node" not in raw:
                raise ZXFormatError(f"{key}[{i}]: needs 'wire' and 'node'")
            out.append((str(raw["wire"]), str(raw["node"])))
        return out

    scalar = 1.0 + 0.0j
    if "scalar" in data:
        raw = data["scalar"]
        try:
            scalar = complex(float(raw.get("re", 0.0)), float(raw.get("im", 0.0)))
        except (AttributeError, TypeError, ValueError) as exc:
            raise ZXFormatError(f"scalar: expected {{'re': .., 'im': ..}} ({exc})") from None
    return ZXDiagram(nodes, tuple(edges), tuple(wires("inputs")), tuple(wires("outputs")), scalar)


def to_dict(d: ZXDiagram) -> dict[str, Any]:
    nodes = []
    for label in sorted(d.nodes):
        node = d.nodes[label]
        entry: dict[str, Any] = {"id": label, "kind": node.kind}
        if node.kind != H:
            entry["phase"] = phase_to_json(node.phase)
        nodes.append(entry)
    return {
        "nodes": nodes,
        "edges": [list(e) for e in sorted(d.edges)],
        "inputs": [{"wire": w, "node": n} for w, n in d.inputs],
        "outputs": [{"wire": w, "node": n} for w, n in d.outputs],
        "scalar": {"re": d.scalar.real, "im": d.scalar.imag},
    }


def load(text: str) -> ZXDiagram:
    """Parse ``.zx.json`` text. Hadamard-edge sugar becomes explicit ``_h<k>`` nodes."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ZXFormatError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return from_dict(data)


def save(d: ZXDiagram) -> str:
    """Canonical ``.zx.json`` text (sorted nodes and edges, explicit scalar)."""
    return json.dumps(to_dict(d), indent=2) + "\n"
