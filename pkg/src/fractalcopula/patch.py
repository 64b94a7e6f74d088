"""The patching operator and its fixed-point iteration.

Patching a copula C by a transformation matrix A replaces each grid rectangle
R_ij (column i of A times row j) with an affinely squeezed copy of C carrying
mass ``a[i][j]``. The result is again piecewise uniform: the mesh inside
column i is the affine image of C's mesh, and cell masses multiply.

When A has at least two columns and two rows the operator contracts the
modified Sobolev norm with exact squared factor ``contraction_factor(A)``, so
the iterates from any seed converge to the unique invariant copula of A; its
support is the self-similar set addressed by A's nonzero entries. One-column
and one-row matrices give no such certificate and :func:`fixpoint` refuses to
certify them.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

from ._rat import ZERO, rat
from .copula import PatchedCopula, independence, sobolev_distance
from .errors import NoContraction, OutOfRange
from .tmatrix import TransformationMatrix, contraction_factor


def apply(t: TransformationMatrix, c: PatchedCopula) -> PatchedCopula:
    """One patching step: squeeze a copy of ``c`` into every cell of ``t``."""
    xb = [ZERO]
    for i in range(t.k):
        base = t.p[i]
        w = t.dp(i)
        for a in range(1, c.nx + 1):
            xb.append(base + w * c.x_breaks[a])
    yb = [ZERO]
    for j in range(t.l):
        base = t.q[j]
        w = t.dq(j)
        for b in range(1, c.ny + 1):
            yb.append(base + w * c.y_breaks[b])
    nx, ny = c.nx, c.ny
    mass = []
    for i in range(t.k):
        col_t = t.entries[i]
        for a in range(nx):
            col_c = c.mass[a]
            out = []
            for j in range(t.l):
                aij = col_t[j]
                if aij == ZERO:
                    out.extend([ZERO] * ny)
                else:
                    out.extend(aij * col_c[b] for b in range(ny))
            mass.append(tuple(out))
    return PatchedCopula(tuple(xb), tuple(yb), tuple(mass))


def iterate(t: TransformationMatrix, c: PatchedCopula, depth: int) -> PatchedCopula:
    """Apply the patching operator ``depth`` times (depth 0 returns ``c``)."""
    if depth < 0:
        raise OutOfRange("depth must be >= 0, got %d" % depth)
    for _ in range(depth):
        c = apply(t, c)
    return c


@dataclass(frozen=True)
class FixpointResult:
    """Outcome of the certified iteration.

    ``steps`` holds one ``(d1sq, d2sq, dssq)`` triple per applied step, the
    exact squared Sobolev distances between successive iterates. ``converged``
    says whether the last ``dssq`` dropped to ``tol**2`` within ``max_depth``
    steps. ``apriori_bound`` is the float Banach estimate
    ``r**depth * dS(first step) / (1 - r)`` for the distance to the invariant
    copula; it is the one deliberately approximate number here, since it needs
    square roots.
    """

    copula: PatchedCopula
    depth: int
    steps: tuple[tuple[object, object, object], ...]
    converged: bool
    r_squared: object
    apriori_bound: float

    @property
    def step_dssq(self):
        """Squared Sobolev distance of the final step (0 if no steps ran)."""
        return self.steps[-1][2] if self.steps else ZERO


def fixpoint(
    t: TransformationMatrix,
    seed: PatchedCopula | None = None,
    tol=None,
    max_depth: int = 6,
) -> FixpointResult:
    """Iterate toward the invariant copula until certified by ``tol``.

    Compares the exact squared step distance against ``tol**2``, so no square
    root is ever taken on the exact side. Raises NoContraction after
    ``max_depth`` steps when ``t`` has a single column or a single row: such
    matrices scale one Sobolev direction by exactly 1, so a small step
    distance certifies nothing (the 1 x 1 matrix fixes every copula).
    """
    if seed is None:
        seed = independence()
    tol = rat(1, 1000) if tol is None else rat(tol)
    if tol <= ZERO:
        raise OutOfRange("tol must be positive, got %s" % tol)
    if max_depth < 1:
        raise OutOfRange("max_depth must be >= 1, got %d" % max_depth)
    tol2 = tol * tol
    degenerate = t.k == 1 or t.l == 1
    r2 = contraction_factor(t)
    current = seed
    steps = []
    converged = False
    for _ in range(max_depth):
        nxt = apply(t, current)
        steps.append(sobolev_distance(current, nxt))
        current = nxt
        if not degenerate and steps[-1][2] <= tol2:
            converged = True
            break
    if degenerate:
        raise NoContraction(
            "matrix is %d x %d; patching scales one Sobolev direction by 1, "
            "no contraction certificate after %d steps" % (t.k, t.l, max_depth)
        )
    r = sqrt(float(r2))
    first = sqrt(float(steps[0][2]))
    bound = (r ** len(steps)) * first / (1.0 - r) if r < 1.0 else float("inf")
    return FixpointResult(
        copula=current,
        depth=len(steps),
        steps=tuple(steps),
        converged=converged,
        r_squared=r2,
        apriori_bound=bound,
    )


def support_cells(c: PatchedCopula) -> set[tuple[int, int]]:
    """Indices (i, j) of the cells carrying positive mass."""
    return {
        (i, j)
        for i in range(c.nx)
        for j in range(c.ny)
        if c.mass[i][j] != ZERO
    }
