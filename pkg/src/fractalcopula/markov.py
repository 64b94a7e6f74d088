"""The Markov operator of a grid copula and its dependence structure.

Every copula C induces a Markov operator T carrying a function of the second
coordinate to its conditional expectation given the first. On a mesh it acts
on step functions: ``(T psi)_i = sum_j mass[i][j] * psi_j / dx_i``. This
module computes T and its adjoint exactly and uses them to expose structure:

* sets whose indicators map to indicators (the invariant sigma-algebra at
  grid scale);
* sigma-atoms: connected components of the support, read as a bipartite
  graph on x-cells and y-cells;
* implicit-dependence witnesses: a pair of measure-preserving step maps
  (f, g) onto a shared coarse mesh such that T factors through them, built
  from the invariant-pair decomposition of a transformation matrix;
* the exact mass a copula places on the matching set of such a pair, a
  certificate that the copula concentrates on ``{f = g}`` at mesh resolution.

Step maps here spread each source cell affinely over its target cell, which
makes them genuinely measure preserving while keeping all bookkeeping at cell
resolution.
"""

from __future__ import annotations

import random
from bisect import bisect_left
from dataclasses import dataclass
from itertools import product as iter_product
from typing import Sequence

from ._rat import ONE, ZERO, rat
from .copula import PatchedCopula
from .errors import (
    BadAddress,
    MeshMismatch,
    NotMeasurePreserving,
    OutOfRange,
    VerificationError,
)
from .tmatrix import Decomposition


@dataclass(frozen=True)
class CellSet:
    """A union of cells of one axis mesh, identified by 0-based indices."""

    breaks: tuple[object, ...]
    members: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "breaks", tuple(self.breaks))
        object.__setattr__(self, "members", frozenset(self.members))
        n = len(self.breaks) - 1
        for m in self.members:
            if not 0 <= m < n:
                raise OutOfRange("cell index %d outside 0..%d" % (m, n - 1))

    @property
    def measure(self):
        return sum(
            (self.breaks[m + 1] - self.breaks[m] for m in self.members), ZERO
        )

    def indicator(self) -> tuple[object, ...]:
        n = len(self.breaks) - 1
        return tuple(ONE if m in self.members else ZERO for m in range(n))

    def complement(self) -> "CellSet":
        n = len(self.breaks) - 1
        return CellSet(self.breaks, frozenset(range(n)) - self.members)


@dataclass(frozen=True)
class StepMap:
    """Measure-preserving step function at mesh resolution.

    ``assignment[s]`` names the target cell onto which source cell ``s`` is
    affinely spread. Build through :func:`stepmap`, which checks that the
    fibers of each target cell carry exactly its width.
    """

    source_breaks: tuple[object, ...]
    target_breaks: tuple[object, ...]
    assignment: tuple[int, ...]

    @property
    def n_source(self) -> int:
        return len(self.source_breaks) - 1

    @property
    def n_target(self) -> int:
        return len(self.target_breaks) - 1

    def preimage(self, targets) -> CellSet:
        """Source cells mapped into the given target cells, as a CellSet."""
        wanted = set(targets)
        return CellSet(
            self.source_breaks,
            frozenset(
                s for s in range(self.n_source) if self.assignment[s] in wanted
            ),
        )


def stepmap(source_breaks, target_breaks, assignment) -> StepMap:
    src = tuple(rat(b) for b in source_breaks)
    tgt = tuple(rat(b) for b in target_breaks)
    asg = tuple(int(a) for a in assignment)
    ns = len(src) - 1
    nt = len(tgt) - 1
    if len(asg) != ns:
        raise NotMeasurePreserving(
            "assignment has %d entries for %d source cells" % (len(asg), ns)
        )
    fiber = [ZERO] * nt
    for s, t in enumerate(asg):
        if not 0 <= t < nt:
            raise OutOfRange("target index %d outside 0..%d" % (t, nt - 1))
        fiber[t] += src[s + 1] - src[s]
    for t in range(nt):
        want = tgt[t + 1] - tgt[t]
        if fiber[t] != want:
            raise NotMeasurePreserving(
                "target cell %d receives measure %s, its width is %s"
                % (t, fiber[t], want)
            )
    return StepMap(src, tgt, asg)


def identity_stepmap(breaks) -> StepMap:
    bs = tuple(rat(b) for b in breaks)
    return StepMap(bs, bs, tuple(range(len(bs) - 1)))


def operator_apply(c: PatchedCopula, psi: Sequence[object]) -> tuple[object, ...]:
    """Apply the Markov operator of ``c`` to step values on the y-mesh."""
    if len(psi) != c.ny:
        raise MeshMismatch("psi has %d values, y-mesh has %d cells" % (len(psi), c.ny))
    vals = [rat(v) for v in psi]
    out = []
    for i in range(c.nx):
        col = c.mass[i]
        acc = ZERO
        for j in range(c.ny):
            if col[j] != ZERO:
                acc += col[j] * vals[j]
        out.append(acc / c.dx(i))
    return tuple(out)


def operator_apply_adjoint(c: PatchedCopula, phi: Sequence[object]) -> tuple[object, ...]:
    """Adjoint operator: step values on the x-mesh to values on the y-mesh.

    Adjoint with respect to the width-weighted inner products; identical to
    the operator of the transposed copula.
    """
    if len(phi) != c.nx:
        raise MeshMismatch("phi has %d values, x-mesh has %d cells" % (len(phi), c.nx))
    vals = [rat(v) for v in phi]
    out = []
    for j in range(c.ny):
        acc = ZERO
        for i in range(c.nx):
            if c.mass[i][j] != ZERO:
                acc += c.mass[i][j] * vals[i]
        out.append(acc / c.dy(j))
    return tuple(out)


def indicator_check(c: PatchedCopula, s: CellSet) -> CellSet | None:
    """If T maps the indicator of ``s`` to an exact indicator, return its set.

    Returns the x-CellSet R with ``T 1_S = 1_R``, or None when the image takes
    a value strictly between 0 and 1. When it succeeds the rectangle R x S
    carries mass equal to both lambda(R) and lambda(S); that equivalence is
    re-checked here and a failure would mean a broken invariant, not bad
    input.
    """
    if s.breaks != c.y_breaks:
        raise MeshMismatch("cell set lives on a different y-mesh")
    image = operator_apply(c, s.indicator())
    members = set()
    for i, v in enumerate(image):
        if v == ONE:
            members.add(i)
        elif v != ZERO:
            return None
    r = CellSet(c.x_breaks, frozenset(members))
    rect = sum(
        (c.mass[i][j] for i in r.members for j in s.members), ZERO
    )
    if rect != r.measure or rect != s.measure:
        raise VerificationError(
            "indicator image found but rectangle mass %s differs from "
            "lambda(R) = %s or lambda(S) = %s" % (rect, r.measure, s.measure)
        )
    return r


@dataclass(frozen=True)
class Atom:
    """One sigma-atom: paired x-cells and y-cells and their common measure."""

    x_cells: CellSet
    y_cells: CellSet
    measure: object


def sigma_atoms(c: PatchedCopula) -> tuple[Atom, ...]:
    """Connected components of the support, ordered by smallest x-cell.

    Because the copula is doubly stochastic, the x-side and y-side of each
    component carry the same measure; the grid-level invariant sigma-algebras
    of T and its adjoint are both generated by these components.
    """
    nx, ny = c.nx, c.ny
    seen_x = [False] * nx
    seen_y = [False] * ny
    atoms = []
    for start in range(nx):
        if seen_x[start]:
            continue
        xs = []
        ys = []
        stack = [("x", start)]
        seen_x[start] = True
        while stack:
            side, idx = stack.pop()
            if side == "x":
                xs.append(idx)
                col = c.mass[idx]
                for j in range(ny):
                    if col[j] != ZERO and not seen_y[j]:
                        seen_y[j] = True
                        stack.append(("y", j))
            else:
                ys.append(idx)
                for i in range(nx):
                    if c.mass[i][idx] != ZERO and not seen_x[i]:
                        seen_x[i] = True
                        stack.append(("x", i))
        x_set = CellSet(c.x_breaks, frozenset(xs))
        y_set = CellSet(c.y_breaks, frozenset(ys))
        if x_set.measure != y_set.measure:
            raise VerificationError(
                "support component has lambda(X) = %s but lambda(Y) = %s"
                % (x_set.measure, y_set.measure)
            )
        atoms.append(Atom(x_set, y_set, x_set.measure))
    return tuple(atoms)


def _refined_breaks(pattern: tuple[object, ...], depth: int) -> tuple[object, ...]:
    """Depth-d self-similar refinement of the unit interval by ``pattern``."""
    breaks = (ZERO, ONE)
    for _ in range(depth):
        out = [ZERO]
        for i in range(len(pattern) - 1):
            base = pattern[i]
            w = pattern[i + 1] - pattern[i]
            for b in range(1, len(breaks)):
                out.append(base + w * breaks[b])
        breaks = tuple(out)
    return breaks


def address_sets(d: Decomposition, address: Sequence[int]) -> tuple[CellSet, CellSet]:
    """Exact cell sets reached by composing block preimages along an address.

    ``address`` lists 0-based block indices, outermost first. The returned
    pair (F, G) lives on the depth-d x- and y-meshes of the iterated patching;
    G is the set of y-addresses whose every letter lies in the rows of the
    corresponding block, F its column mirror. Their common measure is the
    product of the block masses along the address.
    """
    if len(address) == 0:
        raise BadAddress("address must have at least one letter")
    n_blocks = d.n_blocks
    for a in address:
        if not 0 <= int(a) < n_blocks:
            raise BadAddress("block index %s outside 0..%d" % (a, n_blocks - 1))
    t = d.source
    depth = len(address)
    k, l = t.k, t.l
    x_members = [0]
    y_members = [0]
    for a in address:
        block = d.blocks[int(a)]
        x_members = [base * k + i for base in x_members for i in block.cols]
        y_members = [base * l + j for base in y_members for j in block.rows]
    fx = CellSet(_refined_breaks(t.p, depth), frozenset(x_members))
    gy = CellSet(_refined_breaks(t.q, depth), frozenset(y_members))
    return fx, gy


def build_implicit_pair(d: Decomposition, depth: int) -> tuple[StepMap, StepMap]:
    """Step maps (f, g) witnessing implicit dependence at the given depth.

    Both map onto one shared target mesh whose cells are the depth-d block
    addresses in lexicographic order, each of width equal to the product of
    its block masses. f sends a depth-d x-cell to the address spelled by the
    blocks of its column letters; g does the same with row letters. For the
    invariant copula's iterates the rectangle grid of matching addresses
    carries all the mass, which :func:`verify_markov_factorization` and
    :func:`graph_mass` check.
    """
    if depth < 1:
        raise OutOfRange("depth must be >= 1, got %d" % depth)
    t = d.source
    n = d.n_blocks
    widths = {}
    for addr in iter_product(range(n), repeat=depth):
        w = ONE
        for a in addr:
            w = w * d.blocks[a].mass
        widths[addr] = w
    addrs = sorted(widths)
    tgt = [ZERO]
    for addr in addrs:
        tgt.append(tgt[-1] + widths[addr])
    tgt[-1] = ONE
    addr_index = {addr: pos for pos, addr in enumerate(addrs)}

    col_block = [d.block_of_col(i) for i in range(t.k)]
    row_block = [d.block_of_row(j) for j in range(t.l)]

    def assignment(blocks_of_letter, alphabet):
        out = []
        for cell_letters in iter_product(range(alphabet), repeat=depth):
            addr = tuple(blocks_of_letter[c] for c in cell_letters)
            out.append(addr_index[addr])
        return out

    f_assign = assignment(col_block, t.k)
    g_assign = assignment(row_block, t.l)
    f = stepmap(_refined_breaks(t.p, depth), tgt, f_assign)
    g = stepmap(_refined_breaks(t.q, depth), tgt, g_assign)
    return f, g


def step_push(f: StepMap, values: Sequence[object]) -> tuple[object, ...]:
    """Compose step values on the target mesh with f: the value map of T_ef."""
    if len(values) != f.n_target:
        raise MeshMismatch(
            "values cover %d cells, target mesh has %d" % (len(values), f.n_target)
        )
    vals = [rat(v) for v in values]
    return tuple(vals[f.assignment[s]] for s in range(f.n_source))


def step_average(f: StepMap, values: Sequence[object]) -> tuple[object, ...]:
    """Fiber-average step values on the source mesh: the value map of T_fe."""
    if len(values) != f.n_source:
        raise MeshMismatch(
            "values cover %d cells, source mesh has %d" % (len(values), f.n_source)
        )
    vals = [rat(v) for v in values]
    acc = [ZERO] * f.n_target
    for s in range(f.n_source):
        acc[f.assignment[s]] += vals[s] * (
            f.source_breaks[s + 1] - f.source_breaks[s]
        )
    return tuple(
        acc[t] / (f.target_breaks[t + 1] - f.target_breaks[t])
        for t in range(f.n_target)
    )


@dataclass(frozen=True)
class FactorizationReport:
    passed: bool
    failures: tuple[str, ...]
    targets_checked: int
    unions_checked: int
    steps_checked: int


def verify_markov_factorization(
    c: PatchedCopula,
    f: StepMap,
    g: StepMap,
    unions: int = 20,
    steps: int = 20,
    seed: int = 0,
) -> FactorizationReport:
    """Check exactly that the operator of ``c`` factors through (f, g).

    For every single target cell B, and for ``unions`` random unions of
    target cells, the operator must send the indicator of ``g^{-1}(B)`` to
    the indicator of ``f^{-1}(B)``. Additionally, for ``steps`` random
    g-measurable step functions psi, ``T psi`` must equal the composition
    ``T_ef (T_ge psi)``: fiber-average through g, then compose with f. All
    comparisons are exact; failures are reported, never tolerated.
    """
    if c.x_breaks != f.source_breaks:
        raise MeshMismatch("copula x-mesh differs from f's source mesh")
    if c.y_breaks != g.source_breaks:
        raise MeshMismatch("copula y-mesh differs from g's source mesh")
    if f.target_breaks != g.target_breaks:
        raise MeshMismatch("f and g map onto different target meshes")
    nt = f.n_target
    failures = []

    def check_set(targets, label):
        want = step_push(f, tuple(ONE if t in targets else ZERO for t in range(nt)))
        got = operator_apply(
            c, step_push(g, tuple(ONE if t in targets else ZERO for t in range(nt)))
        )
        if got != want:
            failures.append("indicator mismatch on %s" % label)

    for t in range(nt):
        check_set({t}, "target cell %d" % t)
    rng = random.Random(seed)
    for u in range(unions):
        subset = {t for t in range(nt) if rng.random() < 0.5}
        check_set(subset, "union #%d (%d cells)" % (u, len(subset)))
    for s in range(steps):
        theta = tuple(rat(rng.randint(-12, 12), rng.randint(1, 9)) for _ in range(nt))
        psi = step_push(g, theta)
        lhs = operator_apply(c, psi)
        rhs = step_push(f, step_average(g, psi))
        if lhs != rhs:
            failures.append("operator composition mismatch on step #%d" % s)
    return FactorizationReport(
        passed=not failures,
        failures=tuple(failures),
        targets_checked=nt,
        unions_checked=unions,
        steps_checked=steps,
    )


def graph_mass(c: PatchedCopula, f: StepMap, g: StepMap, n: int):
    """Exact mass of the matching set of (f, g) probed at dyadic level n.

    The matching set at level n is the union of ``f^{-1}(P) x g^{-1}(P)``
    over a partition P of [0, 1]. The partition comes from the dyadic points
    ``i / 2**n`` snapped to the nearest target breakpoint (ties upward):
    step maps cannot separate points below their target mesh, so probing
    inside a target cell is meaningless and the partition always consists of
    unions of whole target cells. The result is nonincreasing in n, equals 1
    for every n exactly when the copula's mass lies in matching rectangles,
    and at large n stabilizes at the per-target-cell matching mass.
    """
    if c.x_breaks != f.source_breaks:
        raise MeshMismatch("copula x-mesh differs from f's source mesh")
    if c.y_breaks != g.source_breaks:
        raise MeshMismatch("copula y-mesh differs from g's source mesh")
    if f.target_breaks != g.target_breaks:
        raise MeshMismatch("f and g map onto different target meshes")
    if n < 0:
        raise OutOfRange("level must be >= 0, got %d" % n)
    tgt = f.target_breaks
    snapped = set()
    denom = 1 << n
    for i in range(denom + 1):
        x = rat(i, denom)
        pos = bisect_left(tgt, x)
        if pos == 0:
            snapped.add(tgt[0])
            continue
        if pos == len(tgt):
            snapped.add(tgt[-1])
            continue
        lo, hi = tgt[pos - 1], tgt[pos]
        snapped.add(hi if hi - x <= x - lo else lo)
    cuts = sorted(snapped)
    # part index of each target cell: the interval of cuts containing it
    part_of_target = []
    pi = 0
    for t in range(f.n_target):
        while tgt[t + 1] > cuts[pi + 1]:
            pi += 1
        part_of_target.append(pi)
    part_x = [part_of_target[f.assignment[s]] for s in range(f.n_source)]
    part_y = [part_of_target[g.assignment[s]] for s in range(g.n_source)]
    total = ZERO
    for i in range(c.nx):
        col = c.mass[i]
        pxi = part_x[i]
        for j in range(c.ny):
            if col[j] != ZERO and pxi == part_y[j]:
                total += col[j]
    return total
