"""Kraus operators of the elementary Pauli Fusion operations.

``V`` operations fuse along the X basis (merge/split are X spiders, measure in
``|+>, |->``); ``H`` operations fuse along the Z basis. Rotations: ``R_V`` is a
Z rotation, ``R_H`` an X rotation, both ``exp(-i theta P / 2)``.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["kraus", "kraus_set", "HADAMARD", "SWAP", "KRAUS_KINDS"]

_S2 = 1 / math.sqrt(2)
_ZERO = np.array([1, 0], dtype=complex)
_ONE = np.array([0, 1], dtype=complex)
_PLUS = np.array([_S2, _S2], dtype=complex)
_MINUS = np.array([_S2, -_S2], dtype=complex)

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) * _S2
SWAP = np.eye(4, dtype=complex)[[0, 2, 1, 3]]
_PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)

KRAUS_KINDS = ("A_V", "K_V", "R_V", "A_H", "K_H", "R_H", "H", "SWAP")


def _ket_bra(ket: np.ndarray, bra: np.ndarray) -> np.ndarray:
    return np.outer(ket, bra.conj())


def kraus(kind: str, s: int | None = None, alpha: float | None = None) -> np.ndarray:
    """Return one Kraus operator as a ``2**out x 2**in`` matrix.

    ``kind`` is one of ``A_V, K_V, A_H, K_H`` (require outcome ``s``),
    ``R_V, R_H`` (require angle ``alpha`` in radians), ``H`` or ``SWAP``.

    >>> kraus("A_H", 0).tolist()
    [[(1+0j), 0j]]
    """
    if kind in ("A_V", "K_V", "A_H", "K_H"):
        if s not in (0, 1):
            raise ValueError(f"{kind} needs an outcome s in {{0, 1}}, got {s!r}")
        if alpha is not None:
            raise ValueError(f"{kind} takes no angle")
    elif kind in ("R_V", "R_H"):
        if alpha is None:
            raise ValueError(f"{kind} needs an angle")
        if s is not None:
            raise ValueError(f"{kind} has no outcome")
    elif kind in ("H", "SWAP"):
        if s is not None or alpha is not None:
            raise ValueError(f"{kind} takes no outcome or angle")
    else:
        raise ValueError(f"unknown Kraus operator kind {kind!r}")

    if kind == "A_V":
        return (_PLUS if s == 0 else _MINUS).reshape(1, 2).copy()
    if kind == "A_H":
        return (_ZERO if s == 0 else _ONE).reshape(1, 2).copy()
    if kind == "K_V":
        a, b = (_PLUS, _MINUS)
        if s == 0:
            return _ket_bra(a, np.kron(a, a)) + _ket_bra(b, np.kron(b, b))
        return _ket_bra(a, np.kron(a, b)) + _ket_bra(b, np.kron(b, a))
    if kind == "K_H":
        a, b = (_ZERO, _ONE)
        if s == 0:
            return _ket_bra(a, np.kron(a, a)) + _ket_bra(b, np.kron(b, b))
        return _ket_bra(a, np.kron(a, b)) + _ket_bra(b, np.kron(b, a))
    if kind == "R_V":
        return np.diag([np.exp(-0.5j * alpha), np.exp(0.5j * alpha)])
    if kind == "R_H":
        return math.cos(alpha / 2) * np.eye(2, dtype=complex) - 1j * math.sin(alpha / 2) * _PAULI_X
    if kind == "H":
        return HADAMARD.copy()
    return SWAP.copy()


def kraus_set(op: str, alpha: float = 0.0) -> list[tuple[int | None, np.ndarray]]:
    """Kraus operators of an elementary PF operation, keyed by heralded outcome.

    Non-heralding operations have a single operator keyed ``None``.
    """
    table = {
        "ProjV": lambda: [(s, kraus("A_V", s)) for s in (0, 1)],
        "ProjH": lambda: [(s, kraus("A_H", s)) for s in (0, 1)],
        "MergeV": lambda: [(s, kraus("K_V", s)) for s in (0, 1)],
        "MergeH": lambda: [(s, kraus("K_H", s)) for s in (0, 1)],
        "SplitV": lambda: [(None, kraus("K_V", 0).conj().T)],
        "SplitH": lambda: [(None, kraus("K_H", 0).conj().T)],
        "InitV": lambda: [(None, kraus("A_V", 0).conj().T)],
        "InitH": lambda: [(None, kraus("A_H", 0).conj().T)],
        "RotV": lambda: [(None, kraus("R_V", alpha=alpha))],
        "RotH": lambda: [(None, kraus("R_H", alpha=alpha))],
        "Had": lambda: [(None, HADAMARD.copy())],
        "Swap": lambda: [(None, SWAP.copy())],
    }
    if op not in table:
        raise ValueError(f"unknown PF operation {op!r}")
    return table[op]()
