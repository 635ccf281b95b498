"""Odd neighbourhoods, corrector sets and PF-flows.

Vertex sets are exchanged as ``frozenset`` of labels; internally they are
Python int bitsets indexed by the signature's canonical (sorted) vertex order.

Orders are stored as integer layers: outputs sit at layer 0, a larger layer
means earlier in time, and ``u`` strictly precedes ``v`` iff
``layer[u] > layer[v]``.
"""

from __future__ import annotations

import json
from collections.abc import Iterable
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from pfc.gf2 import GF2Matrix
from pfc.graphlike import Signature

__all__ = [
    "PFFlow",
    "FlowViolation",
    "SizeExceeded",
    "odd_neighborhood",
    "find_corrector",
    "find_pf_flow",
    "validate_pf_flow",
    "exhaustive_flow_oracle",
    "exhaustive_flow_witness",
    "flow_to_dict",
    "flow_from_dict",
    "save_flow",
    "load_flow",
    "ORACLE_LIMIT",
]

ORACLE_LIMIT = 10


class SizeExceeded(ValueError):
    pass


class _Index:
    """Bitset view of a signature."""

    def __init__(self, sig: Signature) -> None:
        self.sig = sig
        self.order = list(sig.vertices)
        self.pos = {v: i for i, v in enumerate(self.order)}
        self.adj = [self.mask(sig.adjacency[v]) for v in self.order]
        # the column of t in the Odd map: its neighbours, plus itself when looped
        self.col = [a | ((1 << i) if v in sig.loops else 0) for i, (v, a) in enumerate(zip(self.order, self.adj))]
        self.inputs = self.mask(sig.inputs)
        self.outputs = self.mask(sig.outputs)
        self.pinned = self.mask(sig.pinned)
        self.diagram = self.mask(sig.diagram_vertices)
        self.n = len(self.order)

    def mask(self, labels: Iterable[str]) -> int:
        out = 0
        for v in labels:
            out |= 1 << self.pos[v]
        return out

    def labels(self, bits: int) -> frozenset[str]:
        return frozenset(self.order[i] for i in _bits(bits))

    def odd(self, bits: int) -> int:
        out = 0
        for i in _bits(bits):
            out ^= self.col[i]
        return out


def _bits(x: int) -> Iterable[int]:
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def odd_neighborhood(sig: Signature, C: Iterable[str]) -> frozenset[str]:
    """Vertices adjacent to an odd number of members of ``C``; a looped vertex neighbours itself."""
    ix = _Index(sig)
    return ix.labels(ix.odd(ix.mask(C)))


class _CorrectorSystem:
    """``A_[M] x = e_u`` for a fixed marked set, eliminated once.

    Rows are the unmarked vertices of the whole signature graph, columns are
    ``M`` union the pinned set. All-zero rows and columns are dropped: they do not
    change the reduced echelon particular solution.
    """

    def __init__(self, ix: _Index, marked: int) -> None:
        self.ix = ix
        unmarked = ((1 << ix.n) - 1) & ~marked
        cols = [j for j in range(ix.n) if (marked | ix.pinned) >> j & 1 and ix.col[j] & unmarked]
        touched = 0
        for j in cols:
            touched |= ix.col[j] & unmarked
        self.rows = list(_bits(touched))
        self.row_pos = {r: k for k, r in enumerate(self.rows)}
        self.cols = cols
        compressed = []
        for j in cols:
            c = 0
            for r in _bits(ix.col[j] & unmarked):
                c |= 1 << self.row_pos[r]
            compressed.append(c)
        self.elim = GF2Matrix.from_columns(compressed, len(self.rows)).eliminate()

    def solve(self, u: int) -> int | None:
        k = self.row_pos.get(u)
        if k is None:
            return None
        x = self.elim.solve(1 << k)
        if x is None:
            return None
        out = 0
        for t in _bits(x):
            out |= 1 << self.cols[t]
        return out


def find_corrector(sig: Signature, M: Iterable[str], u: str) -> frozenset[str] | None:
    """Solve for ``C`` within ``M`` and the pinned set with ``Odd(C) minus M == {u}``.

    Deterministic: the reduced-echelon particular solution over canonical
    column order with every free variable at 0. Returns ``None`` if unsolvable.
    """
    ix = _Index(sig)
    marked = ix.mask(M)
    if u not in ix.pos:
        raise KeyError(u)
    if marked >> ix.pos[u] & 1:
        raise ValueError(f"{u!r} is already in M")
    x = _CorrectorSystem(ix, marked).solve(ix.pos[u])
    return None if x is None else ix.labels(x)


# -- flows --------------------------------------------------------------------


@dataclass(frozen=True)
class PFFlow:
    """A PF-flow: integer layers, distinguished past neighbour ``f`` and corrector table.

    ``correctors`` maps ``(u, v)`` to a ``v``-corrector of ``u``; keys with
    ``u == v`` serve vertices without future neighbours. ``refinements`` lists
    adjacent pairs ``(earlier, later)`` that the finder marked in the same round
    and then ordered by label.
    """

    layers: dict[str, int]
    f: dict[str, str]
    correctors: dict[tuple[str, str], frozenset[str]]
    refinements: tuple[tuple[str, str], ...] = ()
    rounds: int = 0

    def precedes(self, a: str, b: str) -> bool:
        return self.layers[a] > self.layers[b]

    def past(self, sig: Signature, v: str) -> list[str]:
        return sorted(u for u in sig.neighbors(v) if self.precedes(u, v))

    def future(self, sig: Signature, v: str) -> list[str]:
        return sorted(u for u in sig.neighbors(v) if self.precedes(v, u))


@dataclass(frozen=True)
class FlowViolation:
    clause: str
    vertices: tuple[str, ...]
    message: str

    def __str__(self) -> str:
        return f"[{self.clause}] {self.message}"


def _refine_round(group: list[str], sig: Signature) -> tuple[dict[str, int], list[tuple[str, str]]]:
    """Depth-to-sink inside one round; same-round neighbours go earlier-first by label."""
    members = set(group)
    later = {v: sorted(u for u in sig.neighbors(v) if u in members and u > v) for v in group}
    pairs = [(v, u) for v in sorted(group) for u in later[v]]
    depth: dict[str, int] = {}
    for v in sorted(group, reverse=True):
        depth[v] = max((depth[u] + 1 for u in later[v]), default=0)
    return depth, pairs


def find_pf_flow(sig: Signature) -> PFFlow | None:
    """Marking procedure working back from the outputs.

    Each round computes the correctable set ``R``, marks every unmarked
    diagram vertex ``v`` whose nearby set ``N_v`` has at most one
    non-correctable member, records correctors for the rest, and picks
    ``f(v)``. A vertex with no marked neighbour is only marked when it is
    correctable itself, because it will have no future neighbour and needs a
    corrector for its own projection.

    Returns ``None`` when some diagram vertex is never marked.
    """
    ix = _Index(sig)
    marked = ix.outputs
    layers = {v: 0 for v in sig.outputs}
    f: dict[str, str] = {}
    correctors: dict[tuple[str, str], frozenset[str]] = {}
    refinements: list[tuple[str, str]] = []
    base = 1
    rounds = 0
    while True:
        unmarked = ix.diagram & ~marked
        if not unmarked:
            break
        system = _CorrectorSystem(ix, marked)
        solution: dict[int, int] = {}
        for u in _bits(unmarked):
            c = system.solve(u)
            if c is not None:
                solution[u] = c
        correctable = ix.mask(ix.order[u] for u in solution)
        smallest_marked = min(ix.order[i] for i in _bits(marked)) if marked else None
        newly: list[int] = []
        for v in _bits(unmarked):
            nv = ix.adj[v] & ~(1 << v)
            isolated_from_future = not nv & marked
            nv = nv | (1 << v) if isolated_from_future else nv & ~marked
            fv = nv & ~correctable
            if fv.bit_count() > 1 or (fv >> v) & 1:
                continue
            newly.append(v)
            for u in _bits(nv & correctable):
                correctors[(ix.order[u], ix.order[v])] = ix.labels(solution[u])
            if fv:
                f[ix.order[v]] = ix.order[fv.bit_length() - 1]
            else:
                # with nothing marked yet there is no m to pick; v has no past neighbour to name
                f[ix.order[v]] = smallest_marked if smallest_marked is not None else ix.order[v]
        if not newly:
            break
        rounds += 1
        group = [ix.order[v] for v in newly]
        depth, pairs = _refine_round(group, sig)
        refinements.extend(pairs)
        for v in group:
            layers[v] = base + depth[v]
        base = max(layers.values()) + 1
        for v in newly:
            marked |= 1 << v
    if ix.diagram & ~marked:
        return None
    top = max(layers.values(), default=0) + 1
    for i in sig.inputs:
        layers[i] = top
    return PFFlow(layers, f, correctors, tuple(refinements), rounds)


# -- validation ---------------------------------------------------------------


def _check_corrector(
    ix: _Index, flow: PFFlow, u: str, v: str, C: frozenset[str]
) -> list[FlowViolation]:
    out = []
    unknown = sorted(C - set(ix.pos))
    if unknown:
        return [FlowViolation("corrector-structure", (u, v), f"corrector ({u}, {v}) names unknown vertices {unknown}")]
    odd = ix.labels(ix.odd(ix.mask(C)))
    if u not in odd:
        out.append(FlowViolation("corrector-odd", (u, v), f"{u} is not in Odd(C) for corrector ({u}, {v})"))
    must_follow = (C - ix.sig.pinned) | (odd - {u})
    early = sorted(w for w in must_follow if not flow.precedes(v, w))
    if early:
        out.append(
            FlowViolation(
                "corrector-ordering",
                (u, v, *early),
                f"corrector ({u}, {v}) touches {early}, which do not strictly follow {v}",
            )
        )
    return out


def validate_pf_flow(sig: Signature, flow: PFFlow) -> list[FlowViolation]:
    """Check a flow against the PF-flow definition; an empty list means valid.

    Clause codes: ``structure``, ``order`` (adjacent pairs and the
    placement of inputs/outputs), ``same-layer adjacency`` (adjacent vertices
    left incomparable), ``terminal-corrector`` (a vertex with no future
    neighbour lacks a corrector for itself), ``past-corrector`` (a past
    neighbour other than ``f(v)`` lacks a corrector), and ``corrector-odd`` /
    ``corrector-ordering`` for stored sets that are not valid correctors.
    """
    ix = _Index(sig)
    report: list[FlowViolation] = []
    missing = sorted(v for v in sig.vertices if v not in flow.layers)
    if missing:
        return [FlowViolation("structure", tuple(missing), f"no layer for {missing}")]
    for v in sig.diagram_vertices:
        if v not in flow.f:
            report.append(FlowViolation("structure", (v,), f"f is undefined on {v}"))
        elif flow.f[v] not in ix.pos:
            report.append(FlowViolation("structure", (v,), f"f({v}) = {flow.f[v]!r} is not a vertex"))
    for (u, v), C in sorted(flow.correctors.items()):
        report.extend(_check_corrector(ix, flow, u, v, C))

    for v in sig.diagram_vertices:
        for u in sorted(sig.neighbors(v)):
            if flow.layers[u] == flow.layers[v]:
                if u > v or u in sig.inputs or u in sig.outputs:
                    report.append(
                        FlowViolation("same-layer adjacency", (v, u), f"adjacent {v} and {u} share layer {flow.layers[v]}")
                    )
            elif flow.precedes(u, v) and u in sig.outputs:
                report.append(FlowViolation("order", (u, v), f"output {u} precedes its neighbour {v}"))
            elif flow.precedes(v, u) and u in sig.inputs:
                report.append(FlowViolation("order", (u, v), f"input {u} follows its neighbour {v}"))
        if not flow.future(sig, v) and (v, v) not in flow.correctors:
            report.append(FlowViolation("terminal-corrector", (v,), f"{v} has no future neighbour and no corrector ({v}, {v})"))
        for u in flow.past(sig, v):
            if u != flow.f.get(v) and (u, v) not in flow.correctors:
                report.append(
                    FlowViolation("past-corrector", (u, v), f"past neighbour {u} of {v} is not f({v}) and has no corrector")
                )
    return report


# -- exhaustive oracle --------------------------------------------------------


class _Oracle:
    """Search over linear orders, built from the latest vertex backwards.

    Every PF-flow condition only compares adjacent vertices or a vertex with
    its correctors, so it survives passing to any linear extension. Whether
    ``v`` can be placed immediately before an already-placed future set ``F``
    depends only on ``(v, F)``, giving a dynamic programme over subsets.

    Corrector existence is decided by enumerating every vertex subset ``C``:
    ``u`` has an ``F``-corrector iff some ``C`` with ``u`` in ``Odd(C)`` has
    its requirement mask (non-pinned members and other odd neighbours) inside
    ``F``. All tables are numpy arrays indexed by the subset bitmask.
    """

    def __init__(self, sig: Signature) -> None:
        if len(sig.vertices) > ORACLE_LIMIT:
            raise SizeExceeded(f"oracle limited to {ORACLE_LIMIT} vertices, got {len(sig.vertices)}")
        self.ix = ix = _Index(sig)
        n = ix.n
        size = 1 << n
        odd = np.zeros(1, dtype=np.int64)
        for i in range(n):
            odd = np.concatenate([odd, odd ^ ix.col[i]])
        self.odd = odd
        subsets = np.arange(size, dtype=np.int64)
        rest = subsets & ~ix.pinned
        # has[u, F]: u admits a corrector whose requirements lie inside F
        us = np.arange(n, dtype=np.int64)[:, None]
        hit = (odd[None, :] >> us) & 1 == 1
        need = rest[None, :] | (odd[None, :] & ~(1 << us))
        has = np.zeros((n, size), dtype=bool)
        has[np.nonzero(hit)[0], need[hit]] = True
        for b in range(n):
            view = has.reshape(n, -1, 2, 1 << b)
            view[:, :, 1, :] |= view[:, :, 0, :]
        self.has = has
        self.subsets = subsets
        self.ok = np.array([self._placeable(v) for v in range(n)]).reshape(n, size)

    def _placeable(self, v: int) -> np.ndarray:
        """Boolean table over future sets ``F``: may ``v`` sit just before ``F``."""
        ix, fut = self.ix, self.subsets
        size = 1 << ix.n
        if not (ix.diagram >> v) & 1:
            return np.ones(size, dtype=bool)
        nbrs = ix.adj[v] & ~(1 << v)
        ok = ((fut & nbrs & ix.inputs) == 0) & ((~fut & nbrs & ix.outputs) == 0)
        ok &= ((fut & nbrs) != 0) | self.has[v]
        uncorrected = np.zeros(size, dtype=np.int64)
        for u in _bits(nbrs):
            uncorrected += (((fut >> u) & 1) == 0) & ~self.has[u]
        return ok & (uncorrected <= 1)

    def corrector(self, u: int, future: int) -> int | None:
        """The smallest subset ``C`` that is an ``F``-corrector of ``u``."""
        ix = self.ix
        c = np.arange(1 << ix.n, dtype=np.int64)
        odd = self.odd
        need = (c & ~ix.pinned) | (odd & ~(1 << u))
        good = np.flatnonzero(((odd >> u) & 1 == 1) & ((need & ~future) == 0))
        return int(good[0]) if good.size else None

    def placement(self, v: int, future: int) -> tuple[int | None, dict[int, int]] | None:
        """Return ``(f(v), correctors)`` if ``v`` may sit just before ``future``."""
        if not self.ok[v][future]:
            return None
        ix = self.ix
        if not (ix.diagram >> v) & 1:
            return None, {}
        nbrs = ix.adj[v] & ~(1 << v)
        table: dict[int, int] = {}
        if not nbrs & future:
            c = self.corrector(v, future)
            assert c is not None
            table[v] = c
        uncorrected = None
        for u in _bits(nbrs & ~future):
            c = self.corrector(u, future)
            if c is None:
                uncorrected = u
            else:
                table[u] = c
        return uncorrected, table

    def search(self) -> list[int] | None:
        """A valid linear order, latest vertex first, or ``None``."""
        n = self.ix.n
        size = 1 << n
        reach = np.zeros(size, dtype=bool)
        reach[0] = True
        parent = np.full(size, -1, dtype=np.int64)
        popcount = np.zeros(size, dtype=np.int64)
        for i in range(n):
            popcount[1 << i : 2 << i] = popcount[: 1 << i] + 1
        vs = np.arange(n, dtype=np.int64)[None, :]
        for k in range(n):
            layer = self.subsets[(popcount == k) & reach][:, None]
            if not layer.size:
                return None
            step = ((layer >> vs) & 1 == 0) & self.ok[vs, layer]
            dst = (layer | (1 << vs))[step]
            reach[dst] = True
            parent[dst] = np.broadcast_to(vs, step.shape)[step]
        full = size - 1
        if not reach[full]:
            return None
        order = []
        state = full
        while state:
            v = int(parent[state])
            order.append(v)
            state ^= 1 << v
        return order[::-1]


def exhaustive_flow_oracle(sig: Signature) -> bool:
    """Decide PF-flow existence by exhaustive search (at most ``ORACLE_LIMIT`` vertices)."""
    return _Oracle(sig).search() is not None


def exhaustive_flow_witness(sig: Signature) -> PFFlow | None:
    """A PF-flow found by the oracle, with a total order as its layering."""
    oracle = _Oracle(sig)
    order = oracle.search()
    if order is None:
        return None
    ix = oracle.ix
    layers: dict[str, int] = {}
    f: dict[str, str] = {}
    correctors: dict[tuple[str, str], frozenset[str]] = {}
    future = 0
    for depth, v in enumerate(order):
        label = ix.order[v]
        layers[label] = depth
        placed = oracle.placement(v, future)
        assert placed is not None
        fv, table = placed
        if (ix.diagram >> v) & 1:
            f[label] = ix.order[fv] if fv is not None else ix.order[order[0]]
            for u, c in table.items():
                correctors[(ix.order[u], label)] = ix.labels(c)
        future |= 1 << v
    return PFFlow(layers, f, correctors)


# -- serialisation ------------------------------------------------------------


def flow_to_dict(flow: PFFlow) -> dict[str, Any]:
    return {
        "layers": {v: flow.layers[v] for v in sorted(flow.layers)},
        "f": [[v, flow.f[v]] for v in sorted(flow.f)],
        "correctors": [
            {"u": u, "v": v, "set": sorted(flow.correctors[(u, v)])} for u, v in sorted(flow.correctors)
        ],
        "refinements": [list(p) for p in flow.refinements],
        "rounds": flow.rounds,
    }


def flow_from_dict(data: Any) -> PFFlow:
    try:
        layers = {str(k): int(v) for k, v in data["layers"].items()}
        f = {str(v): str(w) for v, w in data.get("f", [])}
        correctors = {(str(c["u"]), str(c["v"])): frozenset(map(str, c["set"])) for c in data.get("correctors", [])}
        refinements = tuple((str(a), str(b)) for a, b in data.get("refinements", []))
        rounds = int(data.get("rounds", 0))
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise ValueError(f"malformed flow: {exc!r}") from None
    return PFFlow(layers, f, correctors, refinements, rounds)


def save_flow(flow: PFFlow) -> str:
    return json.dumps(flow_to_dict(flow), indent=2) + "\n"


def load_flow(text: str) -> PFFlow:
    return flow_from_dict(json.loads(text))
