"""Dense evaluation of ZX diagrams by frontier-sweep tensor contraction."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from pfc.zx import H, X, Z, ZXDiagram

__all__ = [
    "DenseMap",
    "WidthExceeded",
    "DEFAULT_WIDTH_CAP",
    "contraction_order",
    "eval_zx",
    "spider_tensor",
    "proportional",
]

DEFAULT_WIDTH_CAP = 12
_S2 = 1 / math.sqrt(2)


class WidthExceeded(RuntimeError):
    """The contraction frontier grew past the configured cap."""

    def __init__(self, width: int, cap: int, node: str | None = None) -> None:
        where = f" while adding {node!r}" if node else ""
        super().__init__(f"contraction frontier of {width} legs exceeds cap {cap}{where}")
        self.width = width
        self.cap = cap


@dataclass(frozen=True)
class DenseMap:
    """Matrix of shape ``2**len(outputs) x 2**len(inputs)``; first wire is most significant."""

    matrix: np.ndarray
    inputs: tuple[str, ...] = ()
    outputs: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        expected = (2 ** len(self.outputs), 2 ** len(self.inputs))
        if self.matrix.shape != expected:
            raise ValueError(f"matrix shape {self.matrix.shape} does not match wires {expected}")

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape


@lru_cache(maxsize=4096)
def spider_tensor(kind: str, legs: int, phase_num: int, phase_den: int) -> np.ndarray:
    """Unnormalised spider tensor: ``|0..0><0..0| + e^{ia}|1..1><1..1|`` (Z) or its Hadamard conjugate (X)."""
    w = cmath.exp(1j * math.pi * phase_num / phase_den)
    if kind == H:
        if legs != 2:
            raise ValueError("Hadamard node must have exactly two legs")
        return np.array([[1, 1], [1, -1]], dtype=complex) * _S2
    if legs == 0:
        if kind in (Z, X):
            return np.array(1 + w, dtype=complex)
    if kind == Z:
        t = np.zeros((2,) * legs, dtype=complex)
        t[(0,) * legs] = 1
        t[(1,) * legs] = w
        return t
    if kind == X:
        plus = np.array([_S2, _S2], dtype=complex)
        minus = np.array([_S2, -_S2], dtype=complex)
        a = np.array(1, dtype=complex)
        b = np.array(1, dtype=complex)
        for _ in range(legs):
            a = np.multiply.outer(a, plus)
            b = np.multiply.outer(b, minus)
        return a + w * b
    raise ValueError(f"unknown node kind {kind!r}")


def _legs(d: ZXDiagram) -> dict[str, list[int]]:
    """Leg ids per node: edge k -> k; input i -> E+i; output j -> E+nin+j."""
    legs: dict[str, list[int]] = {label: [] for label in d.nodes}
    for k, (a, b) in enumerate(d.edges):
        legs[a].append(k)
        legs[b].append(k)
    base = len(d.edges)
    for i, (_, node) in enumerate(d.inputs):
        legs[node].append(base + i)
    base += len(d.inputs)
    for j, (_, node) in enumerate(d.outputs):
        legs[node].append(base + j)
    return legs


def contraction_order(d: ZXDiagram) -> list[str]:
    """Greedy node order keeping the open frontier small; ties broken by label."""
    legs = _legs(d)
    remaining = sorted(d.nodes)
    frontier: set[int] = set()
    order: list[str] = []
    while remaining:
        best = None
        for label in remaining:
            mine = legs[label]
            inner = {leg for leg in mine if mine.count(leg) == 2}
            shared = sum(1 for leg in mine if leg in frontier)
            width = len(frontier) + len(mine) - len(inner) - 2 * shared
            key = (width, shared == 0 and bool(frontier), label)
            if best is None or key < best[0]:
                best = (key, label)
        label = best[1]
        remaining.remove(label)
        order.append(label)
        for leg in legs[label]:
            if leg in frontier:
                frontier.discard(leg)
            elif legs[label].count(leg) == 1:
                frontier.add(leg)
    return order


def _node_tensor(d: ZXDiagram, label: str, n_legs: int) -> np.ndarray:
    node = d.nodes[label]
    return spider_tensor(node.kind, n_legs, node.phase.num, node.phase.den)


def eval_zx(
    d: ZXDiagram,
    width_cap: int = DEFAULT_WIDTH_CAP,
    order: list[str] | None = None,
) -> DenseMap:
    """Evaluate ``d`` to its dense linear map, times the stored scalar.

    Parameters
    ----------
    d : ZXDiagram
    width_cap : int
        Maximum number of open legs allowed in the running tensor.
    order : list of str, optional
        Node contraction order; diagrams sharing a structure can reuse one
        order from :func:`contraction_order`.
    """
    legs = _legs(d)
    order = contraction_order(d) if order is None else order
    cur = np.array(1, dtype=complex)
    cur_legs: list[int] = []
    for label in order:
        mine = list(legs[label])
        t = _node_tensor(d, label, len(mine))
        # self-loops: trace the repeated leg pair
        while True:
            dup = next((leg for leg in mine if mine.count(leg) == 2), None)
            if dup is None:
                break
            i = mine.index(dup)
            j = mine.index(dup, i + 1)
            t = np.trace(t, axis1=i, axis2=j)
            mine = [leg for k, leg in enumerate(mine) if k not in (i, j)]
        common = [leg for leg in mine if leg in cur_legs]
        width = len(cur_legs) + len(mine) - 2 * len(common)
        if width > width_cap:
            raise WidthExceeded(width, width_cap, label)
        cur = np.tensordot(cur, t, axes=([cur_legs.index(c) for c in common], [mine.index(c) for c in common]))
        cur_legs = [leg for leg in cur_legs if leg not in common] + [leg for leg in mine if leg not in common]

    base = len(d.edges)
    in_legs = [base + i for i in range(len(d.inputs))]
    out_legs = [base + len(d.inputs) + j for j in range(len(d.outputs))]
    perm = [cur_legs.index(leg) for leg in out_legs + in_legs]
    cur = np.transpose(cur, perm) if perm else cur
    matrix = cur.reshape(2 ** len(out_legs), 2 ** len(in_legs)) * d.scalar
    return DenseMap(matrix, tuple(w for w, _ in d.inputs), tuple(w for w, _ in d.outputs))


def _as_array(m: DenseMap | np.ndarray) -> np.ndarray:
    return m.matrix if isinstance(m, DenseMap) else np.asarray(m)


def proportional(a: DenseMap | np.ndarray, b: DenseMap | np.ndarray, tol: float = 1e-9) -> complex | None:
    """Return ``c`` with ``||a - c b||_F <= tol ||a||_F``, or ``None``.

    ``c`` is read off the entry where ``b`` has maximal modulus. Two zero
    maps are proportional with ``c = 1``; a zero and a non-zero map are not.
    """
    a, b = _as_array(a), _as_array(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    norm_a = np.linalg.norm(a)
    norm_b = np.linalg.norm(b)
    if norm_b == 0 or norm_a == 0:
        return 1.0 + 0j if norm_a == norm_b else None
    pivot = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    c = complex(a[pivot] / b[pivot])
    if np.linalg.norm(a - c * b) <= tol * norm_a:
        return c
    return None
