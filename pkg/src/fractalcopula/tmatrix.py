"""Transformation matrices: the exact inputs of the patching operator.

A transformation matrix is a k x l matrix of nonnegative rationals with total
mass 1 and no zero row or column. Entry ``a[i][j]`` sits at column ``i``
(counted from the left, the x direction) and row ``j`` (counted from the
bottom, the y direction); both indices are 0-based here. Column sums accumulate
to the x-breakpoints ``p`` and row sums to the y-breakpoints ``q``, so the
matrix doubles as a piecewise-uniform doubly stochastic measure on the grid
``p x q``.

The module also computes the two exact Sobolev scaling factors of the induced
patching operator, the finest decomposition into invariant pairs (connected
components of the support, viewed as a bipartite column/row graph), and the
rank-one factorization of a decomposition into a left and a right
complete-dependence factor.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

from ._rat import ONE, ZERO, rat
from .errors import (
    EmptyRowOrColumn,
    MassNotOne,
    NegativeEntry,
    NotAPartition,
    RankExceedsOne,
    ValidationError,
)


@dataclass(frozen=True)
class TransformationMatrix:
    """Validated matrix plus its derived breakpoints.

    entries[i][j] is the mass of column i, row j (0-based, rows from the
    bottom). p has length k+1 and q length l+1; both start at 0 and end at 1.
    Build instances through :func:`validate` or :func:`from_rows`.
    """

    entries: tuple[tuple[object, ...], ...]
    p: tuple[object, ...]
    q: tuple[object, ...]

    @property
    def k(self) -> int:
        return len(self.entries)

    @property
    def l(self) -> int:
        return len(self.entries[0])

    def dp(self, i: int):
        return self.p[i + 1] - self.p[i]

    def dq(self, j: int):
        return self.q[j + 1] - self.q[j]

    def rows_top_down(self) -> tuple[tuple[object, ...], ...]:
        """The entries laid out as printed: one tuple per row, top row first."""
        return tuple(
            tuple(self.entries[i][j] for i in range(self.k))
            for j in reversed(range(self.l))
        )


def validate(entries: Sequence[Sequence[object]]) -> TransformationMatrix:
    """Check the matrix invariants and derive the breakpoints.

    ``entries[i][j]`` must follow the column-major, bottom-up convention of
    :class:`TransformationMatrix`. Raises NegativeEntry, MassNotOne or
    EmptyRowOrColumn; rejects ragged input.
    """
    if not entries or not entries[0]:
        raise ValidationError("matrix must have at least one column and one row")
    k = len(entries)
    l = len(entries[0])
    cols = []
    for i, col in enumerate(entries):
        if len(col) != l:
            raise ValidationError("column %d has %d entries, expected %d" % (i, len(col), l))
        cols.append(tuple(rat(v) for v in col))
    for i in range(k):
        for j in range(l):
            if cols[i][j] < ZERO:
                raise NegativeEntry(i, j, cols[i][j])
    total = sum(sum(col) for col in cols)
    if total != ONE:
        raise MassNotOne(total)
    col_sums = [sum(col) for col in cols]
    row_sums = [sum(cols[i][j] for i in range(k)) for j in range(l)]
    for i, s in enumerate(col_sums):
        if s == ZERO:
            raise EmptyRowOrColumn("column", i)
    for j, s in enumerate(row_sums):
        if s == ZERO:
            raise EmptyRowOrColumn("row", j)
    p = [ZERO]
    for s in col_sums:
        p.append(p[-1] + s)
    q = [ZERO]
    for s in row_sums:
        q.append(q[-1] + s)
    p[-1] = ONE
    q[-1] = ONE
    return TransformationMatrix(tuple(cols), tuple(p), tuple(q))


def from_rows(rows: Sequence[Sequence[object]]) -> TransformationMatrix:
    """Build from the printed layout: one sequence per row, top row first."""
    if not rows or not rows[0]:
        raise ValidationError("matrix must have at least one row and one column")
    l = len(rows)
    k = len(rows[0])
    for r, row in enumerate(rows):
        if len(row) != k:
            raise ValidationError("row %d has %d entries, expected %d" % (r, len(row), k))
    entries = [[rows[l - 1 - j][i] for j in range(l)] for i in range(k)]
    return validate(entries)


def transpose(t: TransformationMatrix) -> TransformationMatrix:
    """Mathematical transpose: entry (i, j) moves to (j, i), p and q swap."""
    entries = tuple(
        tuple(t.entries[i][j] for i in range(t.k)) for j in range(t.l)
    )
    return TransformationMatrix(entries, t.q, t.p)


def scaling_factors(t: TransformationMatrix):
    """Exact factors by which patching scales the two squared Sobolev seminorms.

    Returns ``(s1, s2)`` with ``s1 = sum a_ij^2 dq_j / dp_i`` (scales the
    integral of the squared first partial) and ``s2`` its mirror.
    """
    s1 = ZERO
    s2 = ZERO
    for i in range(t.k):
        dpi = t.dp(i)
        for j in range(t.l):
            a = t.entries[i][j]
            if a == ZERO:
                continue
            dqj = t.dq(j)
            a2 = a * a
            s1 += a2 * dqj / dpi
            s2 += a2 * dpi / dqj
    return s1, s2


def contraction_factor(t: TransformationMatrix):
    """r^2 = max of the two Sobolev scaling factors; < 1 whenever k, l >= 2."""
    s1, s2 = scaling_factors(t)
    return s1 if s1 >= s2 else s2


@dataclass(frozen=True)
class Block:
    """One invariant pair: column set, row set, and the mass they carry."""

    cols: tuple[int, ...]
    rows: tuple[int, ...]
    mass: object

    def describe(self) -> str:
        """1-based human-readable rendering, e.g. ``({1,3}, {1,3})``."""
        c = ",".join(str(i + 1) for i in self.cols)
        r = ",".join(str(j + 1) for j in self.rows)
        return "({%s}, {%s})" % (c, r)


@dataclass(frozen=True)
class Decomposition:
    """Finest splitting of a matrix into invariant pairs, in column order."""

    source: TransformationMatrix
    blocks: tuple[Block, ...]

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)

    def block_of_col(self, i: int) -> int:
        for n, b in enumerate(self.blocks):
            if i in b.cols:
                return n
        raise NotAPartition("column %d not covered by any block" % i)

    def block_of_row(self, j: int) -> int:
        for n, b in enumerate(self.blocks):
            if j in b.rows:
                return n
        raise NotAPartition("row %d not covered by any block" % j)


def invariant_pairs(t: TransformationMatrix) -> Decomposition:
    """Finest decomposition into invariant pairs.

    Columns and rows are the two sides of a bipartite graph with an edge where
    ``a[i][j] > 0``; the connected components are exactly the invariant pairs,
    and no finer splitting is possible. Blocks come back ordered by their
    smallest column index. Every column and row lands in some block because the
    matrix has no empty row or column.
    """
    k, l = t.k, t.l
    seen_c = [False] * k
    seen_r = [False] * l
    blocks = []
    for start in range(k):
        if seen_c[start]:
            continue
        comp_c = []
        comp_r = []
        stack = [("c", start)]
        seen_c[start] = True
        while stack:
            side, idx = stack.pop()
            if side == "c":
                comp_c.append(idx)
                for j in range(l):
                    if t.entries[idx][j] != ZERO and not seen_r[j]:
                        seen_r[j] = True
                        stack.append(("r", j))
            else:
                comp_r.append(idx)
                for i in range(k):
                    if t.entries[i][idx] != ZERO and not seen_c[i]:
                        seen_c[i] = True
                        stack.append(("c", i))
        cols = tuple(sorted(comp_c))
        rows = tuple(sorted(comp_r))
        mass = sum(t.entries[i][j] for i in cols for j in rows)
        blocks.append(Block(cols, rows, mass))
    return Decomposition(t, tuple(blocks))


def first_nonzero_minor(t: TransformationMatrix, b: Block):
    """First nonzero 2x2 minor inside a block, or None if it has rank one.

    Scans column pairs, then row pairs, in increasing index order; returns
    ``((i, i'), (j, j'), value)`` for the first violation.
    """
    cs = b.cols
    rs = b.rows
    for ai in range(len(cs)):
        for bi in range(ai + 1, len(cs)):
            i0, i1 = cs[ai], cs[bi]
            for aj in range(len(rs)):
                for bj in range(aj + 1, len(rs)):
                    j0, j1 = rs[aj], rs[bj]
                    minor = (
                        t.entries[i0][j0] * t.entries[i1][j1]
                        - t.entries[i0][j1] * t.entries[i1][j0]
                    )
                    if minor != ZERO:
                        return (i0, i1), (j0, j1), minor
    return None


def rank_one_factorize(d: Decomposition):
    """Split a decomposition into left and right complete-dependence factors.

    Requires every block of ``d`` to have rank one; otherwise raises
    RankExceedsOne naming the block and the first nonzero 2x2 minor (scanning
    column pairs, then row pairs, in increasing order). On success returns
    ``(L, R)`` where L is k x N, R is N x l (N = number of blocks), L's row n
    holds the column sums of block n and R's column n its row sums. Both come
    back as validated transformation matrices; L has one nonzero per column and
    R one nonzero per row, and block n of the product identity carries mass
    ``|A_n|`` on L's row n and R's column n.
    """
    t = d.source
    for n, b in enumerate(d.blocks):
        witness = first_nonzero_minor(t, b)
        if witness is not None:
            cols, rows, minor = witness
            raise RankExceedsOne(n, cols, rows, minor)
    n_blocks = d.n_blocks
    left = [[ZERO] * n_blocks for _ in range(t.k)]
    right = [[ZERO] * t.l for _ in range(n_blocks)]
    for n, b in enumerate(d.blocks):
        for i in b.cols:
            left[i][n] = sum(t.entries[i][j] for j in b.rows)
        for j in b.rows:
            right[n][j] = sum(t.entries[i][j] for i in b.cols)
    return validate(left), validate(right)


class DependenceKind(enum.Enum):
    LEFT = "left"
    RIGHT = "right"
    BOTH = "both"
    NEITHER = "neither"


def complete_dependence_kind(t: TransformationMatrix) -> DependenceKind:
    """Classify by support: one nonzero per column (left), per row (right)."""
    per_col = all(
        sum(1 for j in range(t.l) if t.entries[i][j] != ZERO) == 1 for i in range(t.k)
    )
    per_row = all(
        sum(1 for i in range(t.k) if t.entries[i][j] != ZERO) == 1 for j in range(t.l)
    )
    if per_col and per_row:
        return DependenceKind.BOTH
    if per_col:
        return DependenceKind.LEFT
    if per_row:
        return DependenceKind.RIGHT
    return DependenceKind.NEITHER
