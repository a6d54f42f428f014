"""Exact Smith normal form of sparse integer matrices.

Unit pivots are eliminated first in Markowitz order on a sparse row/column
structure; whatever is left (typically a handful of rows) goes through a
dense Euclidean diagonalisation with minimal-norm pivots.  All arithmetic
uses Python integers, so no entry can overflow.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from math import gcd

from .errors import SizeLimitExceeded

DEFAULT_MAX_NNZ = 20_000


class IntegerMatrix:
    """Sparse integer matrix as a dict of nonzero ``(row, col) -> value``."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries=None):
        self.rows = int(rows)
        self.cols = int(cols)
        self.entries: dict[tuple[int, int], int] = {}
        if entries:
            for (i, j), v in dict(entries).items():
                if not (0 <= i < rows and 0 <= j < cols):
                    raise IndexError((i, j))
                if v:
                    self.entries[(i, j)] = int(v)

    @classmethod
    def from_triples(cls, rows: int, cols: int, triples) -> "IntegerMatrix":
        """Accumulate ``(i, j, v)`` triples; repeated positions are summed."""
        acc: dict[tuple[int, int], int] = {}
        for i, j, v in triples:
            acc[(i, j)] = acc.get((i, j), 0) + int(v)
        return cls(rows, cols, acc)

    @classmethod
    def from_dense(cls, rows) -> "IntegerMatrix":
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        return cls(
            len(rows),
            ncols,
            {(i, j): v for i, r in enumerate(rows) for j, v in enumerate(r) if v},
        )

    def to_dense(self) -> list[list[int]]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def nnz(self) -> int:
        return len(self.entries)

    def column(self, j: int) -> dict[int, int]:
        return {i: v for (i, jj), v in self.entries.items() if jj == j}

    def __matmul__(self, other: "IntegerMatrix") -> "IntegerMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        by_row: dict[int, list[tuple[int, int]]] = {}
        for (k, j), v in other.entries.items():
            by_row.setdefault(k, []).append((j, v))
        acc: dict[tuple[int, int], int] = {}
        for (i, k), v in self.entries.items():
            for j, w in by_row.get(k, ()):
                acc[(i, j)] = acc.get((i, j), 0) + v * w
        return IntegerMatrix(self.rows, other.cols, acc)

    def is_zero(self) -> bool:
        return not self.entries

    def __eq__(self, other):
        if not isinstance(other, IntegerMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __repr__(self):
        return f"IntegerMatrix({self.rows}x{self.cols}, nnz={self.nnz})"


@dataclass(frozen=True)
class SmithResult:
    rank: int
    invariant_factors: tuple[int, ...]   # entries > 1, each dividing the next


def smith_normal_form(m: IntegerMatrix, max_nnz: int | None = DEFAULT_MAX_NNZ) -> SmithResult:
    if max_nnz is not None and m.nnz > max_nnz:
        raise SizeLimitExceeded(f"{m.nnz} nonzeros exceeds the cap of {max_nnz}")
    rows: dict[int, dict[int, int]] = {}
    cols: dict[int, set[int]] = {}
    for (i, j), v in m.entries.items():
        rows.setdefault(i, {})[j] = v
        cols.setdefault(j, set()).add(i)

    rank = 0
    heap = [(len(s), j) for j, s in cols.items()]
    heapq.heapify(heap)
    while heap:
        size, c = heapq.heappop(heap)
        col = cols.get(c)
        if col is None or len(col) != size:
            continue
        pivot = None
        for r in col:
            if rows[r][c] in (1, -1) and (pivot is None or len(rows[r]) < len(rows[pivot])):
                pivot = r
        if pivot is None:
            continue
        rank += 1
        touched = _eliminate(rows, cols, pivot, c)
        for cc in touched:
            s = cols.get(cc)
            if s is not None:
                heapq.heappush(heap, (len(s), cc))

    rest_rows = sorted(r for r, row in rows.items() if row)
    rest_cols = sorted(c for c, s in cols.items() if s)
    if not rest_rows:
        return SmithResult(rank, ())
    col_index = {c: k for k, c in enumerate(rest_cols)}
    dense = [[0] * len(rest_cols) for _ in rest_rows]
    for k, r in enumerate(rest_rows):
        for c, v in rows[r].items():
            dense[k][col_index[c]] = v
    diag = _dense_diagonal(dense)
    factors = invariant_factors_from_diagonal(diag)
    return SmithResult(rank + len(factors), tuple(d for d in factors if d > 1))


def _eliminate(rows, cols, p, c) -> set[int]:
    """Clear column ``c`` with the unit pivot at ``(p, c)`` and drop row ``p``."""
    prow = rows.pop(p)
    pv = prow[c]
    touched = set(prow)
    for r in list(cols[c]):
        if r == p:
            continue
        rrow = rows[r]
        factor = rrow[c] * pv
        for cc, v in prow.items():
            nv = rrow.get(cc, 0) - factor * v
            if nv:
                if cc not in rrow:
                    cols[cc].add(r)
                rrow[cc] = nv
            elif cc in rrow:
                del rrow[cc]
                cols[cc].discard(r)
    for cc in prow:
        cols[cc].discard(p)
    del cols[c]
    touched.discard(c)
    return touched


def _dense_diagonal(a: list[list[int]]) -> list[int]:
    """Diagonalise by unimodular row/column operations; returns |pivots|."""
    m = len(a)
    n = len(a[0]) if m else 0
    diag = []
    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            row = a[i]
            for j in range(t, n):
                v = row[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        a[t], a[i] = a[i], a[t]
        for row in a:
            row[t], row[j] = row[j], row[t]
        while True:
            p = a[t][t]
            done = True
            for i in range(t + 1, m):
                if a[i][t]:
                    q = a[i][t] // p
                    if q:
                        ri, rt = a[i], a[t]
                        for k in range(t, n):
                            ri[k] -= q * rt[k]
                    if a[i][t]:
                        done = False
            for j in range(t + 1, n):
                if a[t][j]:
                    q = a[t][j] // p
                    if q:
                        for row in a[t:]:
                            row[j] -= q * row[t]
                    if a[t][j]:
                        done = False
            if done:
                break
            # move the smallest leftover in row/column t onto the pivot
            cand = [(abs(a[i][t]), i, t) for i in range(t + 1, m) if a[i][t]]
            cand += [(abs(a[t][j]), t, j) for j in range(t + 1, n) if a[t][j]]
            _, i, j = min(cand)
            if j == t:
                a[t], a[i] = a[i], a[t]
            else:
                for row in a:
                    row[t], row[j] = row[j], row[t]
        diag.append(abs(a[t][t]))
        t += 1
    return diag


def invariant_factors_from_diagonal(diag) -> list[int]:
    """Turn any nonzero diagonal into the divisibility chain d1 | d2 | ..."""
    d = [abs(int(x)) for x in diag if x]
    for i in range(len(d)):
        for j in range(i + 1, len(d)):
            g = gcd(d[i], d[j])
            d[i], d[j] = g, d[i] * d[j] // g
    return d


def matrix_rank(m: IntegerMatrix, max_nnz: int | None = DEFAULT_MAX_NNZ) -> int:
    return smith_normal_form(m, max_nnz).rank
