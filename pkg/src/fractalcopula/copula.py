"""Piecewise-uniform bivariate copulas on rational meshes, computed exactly.

A :class:`PatchedCopula` is a doubly stochastic measure on the unit square
whose density is constant on every cell of a rational rectangular mesh. This
class of measures is closed under everything the package does: the star
product, transposition, convex combination, patching, and the Markov operator
all land back in it, so every computation stays in exact rational arithmetic.

Cell masses are stored x-major: ``mass[i][j]`` is the mass of the rectangle
``[x_breaks[i], x_breaks[i+1]] x [y_breaks[j], y_breaks[j+1]]``. The copula
(as a CDF) is the bilinear interpolant of the cumulative masses, and the
one-dimensional marginals are uniform because each mesh strip carries exactly
its width in mass.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from typing import Sequence

from ._rat import ONE, ZERO, rat
from .errors import (
    BadMarginal,
    NegativeEntry,
    NotAPartition,
    OutOfRange,
    ValidationError,
)


@dataclass(frozen=True)
class PatchedCopula:
    """Mesh breakpoints plus the mass matrix; build via :func:`from_parts`."""

    x_breaks: tuple[object, ...]
    y_breaks: tuple[object, ...]
    mass: tuple[tuple[object, ...], ...]

    @property
    def nx(self) -> int:
        return len(self.x_breaks) - 1

    @property
    def ny(self) -> int:
        return len(self.y_breaks) - 1

    def dx(self, i: int):
        return self.x_breaks[i + 1] - self.x_breaks[i]

    def dy(self, j: int):
        return self.y_breaks[j + 1] - self.y_breaks[j]


def _check_breaks(breaks: Sequence[object], axis: str) -> tuple[object, ...]:
    bs = tuple(rat(b) for b in breaks)
    if len(bs) < 2:
        raise NotAPartition("%s mesh needs at least two breakpoints" % axis)
    if bs[0] != ZERO or bs[-1] != ONE:
        raise NotAPartition("%s mesh must run from 0 to 1" % axis)
    for a, b in zip(bs, bs[1:]):
        if not a < b:
            raise NotAPartition("%s mesh not strictly increasing at %s" % (axis, b))
    return bs


def from_parts(x_breaks, y_breaks, mass) -> PatchedCopula:
    """Validate breakpoints and masses and assemble a copula.

    ``mass[i][j]`` follows the x-major layout of :class:`PatchedCopula`.
    Raises NotAPartition for bad meshes, NegativeEntry for negative cells and
    BadMarginal where a strip's total differs from its width.
    """
    xb = _check_breaks(x_breaks, "x")
    yb = _check_breaks(y_breaks, "y")
    nx = len(xb) - 1
    ny = len(yb) - 1
    if len(mass) != nx:
        raise ValidationError("mass has %d columns, mesh has %d" % (len(mass), nx))
    cols = []
    for i, col in enumerate(mass):
        if len(col) != ny:
            raise ValidationError(
                "mass column %d has %d cells, mesh has %d" % (i, len(col), ny)
            )
        cols.append(tuple(rat(v) for v in col))
    for i in range(nx):
        for j in range(ny):
            if cols[i][j] < ZERO:
                raise NegativeEntry(i, j, cols[i][j])
    for i in range(nx):
        total = sum(cols[i])
        if total != xb[i + 1] - xb[i]:
            raise BadMarginal("x", i, total, xb[i + 1] - xb[i])
    for j in range(ny):
        total = sum(cols[i][j] for i in range(nx))
        if total != yb[j + 1] - yb[j]:
            raise BadMarginal("y", j, total, yb[j + 1] - yb[j])
    return PatchedCopula(xb, yb, tuple(cols))


def check_invariants(c: PatchedCopula) -> PatchedCopula:
    """Re-run full validation on an existing instance (used by the tests)."""
    return from_parts(c.x_breaks, c.y_breaks, c.mass)


def independence() -> PatchedCopula:
    """The product copula on the trivial one-cell mesh."""
    return PatchedCopula((ZERO, ONE), (ZERO, ONE), ((ONE,),))


def diagonal(n: int) -> PatchedCopula:
    """Mesh approximation of complete positive dependence: mass 1/n on the
    n diagonal cells of the uniform n x n mesh."""
    if n < 1:
        raise OutOfRange("need n >= 1, got %d" % n)
    breaks = tuple(rat(i, n) for i in range(n + 1))
    w = rat(1, n)
    mass = tuple(
        tuple(w if i == j else ZERO for j in range(n)) for i in range(n)
    )
    return PatchedCopula(breaks, breaks, mass)


def antidiagonal(n: int) -> PatchedCopula:
    """As :func:`diagonal` but supported on the antidiagonal cells."""
    if n < 1:
        raise OutOfRange("need n >= 1, got %d" % n)
    breaks = tuple(rat(i, n) for i in range(n + 1))
    w = rat(1, n)
    mass = tuple(
        tuple(w if i + j == n - 1 else ZERO for j in range(n)) for i in range(n)
    )
    return PatchedCopula(breaks, breaks, mass)


def block_diagonal(breaks, parts) -> PatchedCopula:
    """Conditional-expectation copula of a mesh partition.

    ``parts`` partitions the cell indices of ``breaks``; the result spreads
    mass uniformly over ``B x B`` for each part ``B``. It is symmetric and
    idempotent under the star product, and its support components are exactly
    the parts.
    """
    bs = _check_breaks(breaks, "shared")
    n = len(bs) - 1
    owner = [-1] * n
    for pi, part in enumerate(parts):
        for cell in part:
            if not 0 <= cell < n:
                raise NotAPartition("cell index %d out of range" % cell)
            if owner[cell] != -1:
                raise NotAPartition("cell %d appears in two parts" % cell)
            owner[cell] = pi
    if any(o == -1 for o in owner):
        raise NotAPartition("parts do not cover every cell")
    part_width = {}
    for cell, o in enumerate(owner):
        part_width[o] = part_width.get(o, ZERO) + (bs[cell + 1] - bs[cell])
    mass = tuple(
        tuple(
            (bs[i + 1] - bs[i]) * (bs[j + 1] - bs[j]) / part_width[owner[i]]
            if owner[i] == owner[j]
            else ZERO
            for j in range(n)
        )
        for i in range(n)
    )
    return PatchedCopula(bs, bs, mass)


def cdf(c: PatchedCopula, u, v):
    """Exact value of the copula at ``(u, v)``; raises OutOfRange off-square."""
    u = rat(u)
    v = rat(v)
    if not (ZERO <= u <= ONE and ZERO <= v <= ONE):
        raise OutOfRange("(%s, %s) outside the unit square" % (u, v))
    if u == ZERO or v == ZERO:
        return ZERO
    if u == ONE:
        return v
    if v == ONE:
        return u
    i = bisect_right(c.x_breaks, u) - 1
    j = bisect_right(c.y_breaks, v) - 1
    fx = (u - c.x_breaks[i]) / c.dx(i)
    fy = (v - c.y_breaks[j]) / c.dy(j)
    total = ZERO
    for a in range(i):
        col = c.mass[a]
        for b in range(j):
            total += col[b]
        total += fy * col[j]
    coli = c.mass[i]
    for b in range(j):
        total += fx * coli[b]
    total += fx * fy * coli[j]
    return total


def merge_breaks(a: Sequence[object], b: Sequence[object]) -> tuple[object, ...]:
    """Sorted union of two breakpoint tuples."""
    out = []
    ia = ib = 0
    while ia < len(a) or ib < len(b):
        if ib == len(b) or (ia < len(a) and a[ia] < b[ib]):
            nxt = a[ia]
            ia += 1
        elif ia < len(a) and a[ia] == b[ib]:
            nxt = a[ia]
            ia += 1
            ib += 1
        else:
            nxt = b[ib]
            ib += 1
        out.append(nxt)
    return tuple(out)


def _axis_refinement(coarse, fine):
    """For each fine cell: (parent coarse cell, width ratio fine/parent).

    ``fine`` must contain every breakpoint of ``coarse``.
    """
    out = []
    ci = 0
    for a in range(len(fine) - 1):
        while coarse[ci + 1] <= fine[a]:
            ci += 1
        if fine[a] < coarse[ci] or coarse[ci + 1] < fine[a + 1]:
            raise ValidationError("refinement does not contain the coarse mesh")
        ratio = (fine[a + 1] - fine[a]) / (coarse[ci + 1] - coarse[ci])
        out.append((ci, ratio))
    return out


def refine(c: PatchedCopula, x_breaks, y_breaks) -> PatchedCopula:
    """Re-express ``c`` on a finer mesh; mass splits by area within each cell."""
    x_breaks = _check_breaks(x_breaks, "x")
    y_breaks = _check_breaks(y_breaks, "y")
    rx = _axis_refinement(c.x_breaks, x_breaks)
    ry = _axis_refinement(c.y_breaks, y_breaks)
    mass = tuple(
        tuple(c.mass[pi][pj] * ri * rj for (pj, rj) in ry) for (pi, ri) in rx
    )
    return PatchedCopula(tuple(x_breaks), tuple(y_breaks), mass)


def _common(c: PatchedCopula, d: PatchedCopula):
    xb = merge_breaks(c.x_breaks, d.x_breaks)
    yb = merge_breaks(c.y_breaks, d.y_breaks)
    return refine(c, xb, yb), refine(d, xb, yb)


def same_measure(c: PatchedCopula, d: PatchedCopula) -> bool:
    """Exact equality as measures (compared on the common mesh refinement)."""
    rc, rd = _common(c, d)
    return rc.mass == rd.mass


def transpose(c: PatchedCopula) -> PatchedCopula:
    mass = tuple(
        tuple(c.mass[i][j] for i in range(c.nx)) for j in range(c.ny)
    )
    return PatchedCopula(c.y_breaks, c.x_breaks, mass)


def convex(alpha, c: PatchedCopula, d: PatchedCopula) -> PatchedCopula:
    """Exact mixture ``alpha * c + (1 - alpha) * d``; alpha in [0, 1]."""
    alpha = rat(alpha)
    if not ZERO <= alpha <= ONE:
        raise OutOfRange("mixture weight %s outside [0, 1]" % alpha)
    rc, rd = _common(c, d)
    beta = ONE - alpha
    mass = tuple(
        tuple(alpha * rc.mass[i][j] + beta * rd.mass[i][j] for j in range(rc.ny))
        for i in range(rc.nx)
    )
    return PatchedCopula(rc.x_breaks, rc.y_breaks, mass)


def star(c: PatchedCopula, d: PatchedCopula) -> PatchedCopula:
    """The star product: composition of the underlying Markov kernels.

    Defined by ``(C * D)(u, w) = integral of d2 C(u, t) d1 D(t, w) dt``. For
    piecewise-uniform factors the integral is a finite sum over the common
    refinement of C's y-mesh and D's x-mesh, and the product lives on C's
    x-mesh times D's y-mesh:

        mass[i][m] = sum over segments s of
            mass_C[i][j(s)] * |s| / (dy_C(j(s)) * dx_D(i(s))) * mass_D[i(s)][m]

    The operation is associative, has the independence copula as a null
    element and complete positive dependence as identity, and transposition
    reverses it.
    """
    t = merge_breaks(c.y_breaks, d.x_breaks)
    segs = []  # (parent y-cell of c, parent x-cell of d, weight)
    jc = 0
    idd = 0
    for s in range(len(t) - 1):
        while c.y_breaks[jc + 1] <= t[s]:
            jc += 1
        while d.x_breaks[idd + 1] <= t[s]:
            idd += 1
        w = (t[s + 1] - t[s]) / (c.dy(jc) * d.dx(idd))
        segs.append((jc, idd, w))
    # bridge[j][m] = sum_s weight * mass_D[i(s)][m] over segments with j(s) = j
    bridge = [[ZERO] * d.ny for _ in range(c.ny)]
    for jc, idd, w in segs:
        dcol = d.mass[idd]
        row = bridge[jc]
        for m in range(d.ny):
            dm = dcol[m]
            if dm != ZERO:
                row[m] += w * dm
    mass = []
    for i in range(c.nx):
        ccol = c.mass[i]
        out = [ZERO] * d.ny
        for j in range(c.ny):
            cij = ccol[j]
            if cij == ZERO:
                continue
            brow = bridge[j]
            for m in range(d.ny):
                bm = brow[m]
                if bm != ZERO:
                    out[m] += cij * bm
        mass.append(tuple(out))
    return PatchedCopula(c.x_breaks, d.y_breaks, tuple(mass))


def sobolev_distance(c: PatchedCopula, d: PatchedCopula):
    """Exact squared modified Sobolev distance, split by direction.

    Returns ``(d1sq, d2sq, dssq)``: the integrals of the squared difference of
    the first partials, of the second partials, and their sum. On each cell of
    the common refinement the difference of first partials is affine in v
    (slope from the cell's mass surplus, offset from the column's cumulative
    surplus), so each cell contributes a closed-form quadratic integral and the
    whole distance is a finite exact sum.
    """
    rc, rd = _common(c, d)
    nx, ny = rc.nx, rc.ny
    dxs = [rc.dx(i) for i in range(nx)]
    dys = [rc.dy(j) for j in range(ny)]
    diff = [
        [rc.mass[i][j] - rd.mass[i][j] for j in range(ny)] for i in range(nx)
    ]
    third = rat(1, 3)

    d1 = ZERO
    for i in range(nx):
        dxi = dxs[i]
        col = diff[i]
        cum = ZERO
        for j in range(ny):
            dyj = dys[j]
            e = col[j]
            if cum == ZERO and e == ZERO:
                continue
            alpha = cum / dxi
            beta = e / (dxi * dyj)
            d1 += dxi * dyj * (
                alpha * alpha + alpha * beta * dyj + third * beta * beta * dyj * dyj
            )
            cum += e
    d2 = ZERO
    for j in range(ny):
        dyj = dys[j]
        cum = ZERO
        for i in range(nx):
            dxi = dxs[i]
            e = diff[i][j]
            if cum == ZERO and e == ZERO:
                continue
            alpha = cum / dyj
            beta = e / (dxi * dyj)
            d2 += dyj * dxi * (
                alpha * alpha + alpha * beta * dxi + third * beta * beta * dxi * dxi
            )
            cum += e
    return d1, d2, d1 + d2


def sup_distance(c: PatchedCopula, d: PatchedCopula):
    """Exact maximum of |C - D|.

    The difference of two piecewise-bilinear CDFs is bilinear on every cell of
    the common refinement, so its maximum absolute value is attained at a mesh
    node; the node values are cumulative mass sums.
    """
    rc, rd = _common(c, d)
    nx, ny = rc.nx, rc.ny
    best = ZERO
    prev = [ZERO] * (ny + 1)
    for i in range(nx):
        cur = [ZERO] * (ny + 1)
        run = ZERO
        for j in range(ny):
            run += rc.mass[i][j] - rd.mass[i][j]
            cur[j + 1] = prev[j + 1] + run
            mag = cur[j + 1] if cur[j + 1] >= ZERO else -cur[j + 1]
            if mag > best:
                best = mag
        prev = cur
    return best
