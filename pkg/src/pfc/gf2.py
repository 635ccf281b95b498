"""Dense GF(2) linear algebra on Python integer bitsets.

Row ``i`` of a matrix is an int whose bit ``j`` is the entry in column ``j``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

__all__ = ["GF2Matrix", "Elimination"]


@dataclass(frozen=True)
class GF2Matrix:
    nrows: int
    ncols: int
    rows: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.rows) != self.nrows:
            raise ValueError("row count does not match nrows")
        limit = 1 << self.ncols
        if any(r < 0 or r >= limit for r in self.rows):
            raise ValueError("row has bits beyond ncols")

    @classmethod
    def from_columns(cls, columns: list[int], nrows: int) -> GF2Matrix:
        rows = [0] * nrows
        for j, col in enumerate(columns):
            i = 0
            while col:
                if col & 1:
                    rows[i] |= 1 << j
                col >>= 1
                i += 1
        return cls(nrows, len(columns), tuple(rows))

    def column(self, j: int) -> int:
        return sum(((r >> j) & 1) << i for i, r in enumerate(self.rows))

    def mul_vec(self, x: int) -> int:
        """``A x`` with ``x`` a column bitset; result is a row-index bitset."""
        out = 0
        for i, r in enumerate(self.rows):
            if (r & x).bit_count() & 1:
                out |= 1 << i
        return out

    def eliminate(self) -> Elimination:
        return Elimination.of(self)

    def rank(self) -> int:
        return len(self.eliminate().pivots)

    def solve(self, rhs: int) -> int | None:
        return self.eliminate().solve(rhs)


@dataclass(frozen=True)
class Elimination:
    """Reduced row echelon form ``E = T A`` with the transform ``T`` kept.

    Solving ``A x = b`` for many right-hand sides costs one pass over ``T``
    each. The particular solution sets every free variable to 0.
    """

    reduced: tuple[int, ...]
    transform: tuple[int, ...]
    pivots: tuple[int, ...] = field(default=())

    @classmethod
    def of(cls, a: GF2Matrix) -> Elimination:
        rows = list(a.rows)
        trans = [1 << i for i in range(a.nrows)]
        pivots: list[int] = []
        r = 0
        for j in range(a.ncols):
            bit = 1 << j
            p = next((i for i in range(r, a.nrows) if rows[i] & bit), None)
            if p is None:
                continue
            rows[r], rows[p] = rows[p], rows[r]
            trans[r], trans[p] = trans[p], trans[r]
            for i in range(a.nrows):
                if i != r and rows[i] & bit:
                    rows[i] ^= rows[r]
                    trans[i] ^= trans[r]
            pivots.append(j)
            r += 1
        return cls(tuple(rows), tuple(trans), tuple(pivots))

    def solve(self, rhs: int) -> int | None:
        rank = len(self.pivots)
        for i in range(rank, len(self.transform)):
            if (self.transform[i] & rhs).bit_count() & 1:
                return None
        x = 0
        for i, j in enumerate(self.pivots):
            if (self.transform[i] & rhs).bit_count() & 1:
                x |= 1 << j
        return x
