"""Shared test utilities: seeded exact generators and independent oracles.

Everything here stays in exact rational arithmetic. The generators take a
``random.Random`` so every test run is reproducible; the Sobolev oracle
recomputes distances from CDF values alone (finite differences plus Simpson),
deliberately sharing no code path with the implementation it checks.
"""

from __future__ import annotations

import random

from fractalcopula import copula as cop
from fractalcopula import tmatrix as tm
from fractalcopula._rat import ONE, ZERO, rat
from fractalcopula.markov import StepMap


def rand_breaks(rng: random.Random, max_cells: int) -> tuple:
    """Strictly increasing rational breakpoints from 0 to 1."""
    n = rng.randint(1, max_cells)
    if n == 1:
        return (ZERO, ONE)
    den = n * rng.randint(2, 5)
    cuts = sorted(rng.sample(range(1, den), n - 1))
    return tuple([ZERO] + [rat(c, den) for c in cuts] + [ONE])


def nw_coupling(rx, ry, rng: random.Random):
    """Cell masses with the given marginals via a shuffled northwest-corner rule."""
    m, n = len(rx), len(ry)
    order_i = list(range(m))
    order_j = list(range(n))
    rng.shuffle(order_i)
    rng.shuffle(order_j)
    rem_i = list(rx)
    rem_j = list(ry)
    mass = [[ZERO] * n for _ in range(m)]
    a = b = 0
    while a < m and b < n:
        i, j = order_i[a], order_j[b]
        take = rem_i[i] if rem_i[i] <= rem_j[j] else rem_j[j]
        mass[i][j] += take
        rem_i[i] -= take
        rem_j[j] -= take
        if rem_i[i] == ZERO:
            a += 1
        if rem_j[j] == ZERO:
            b += 1
    return mass


def random_copula(
    rng: random.Random,
    max_cells: int = 9,
    x_breaks=None,
    y_breaks=None,
) -> cop.PatchedCopula:
    """Random piecewise-uniform copula: a mixture of two shuffled couplings
    and the product coupling, so supports vary from sparse to full."""
    xb = x_breaks if x_breaks is not None else rand_breaks(rng, max_cells)
    yb = y_breaks if y_breaks is not None else rand_breaks(rng, max_cells)
    nx, ny = len(xb) - 1, len(yb) - 1
    rx = [xb[i + 1] - xb[i] for i in range(nx)]
    ry = [yb[j + 1] - yb[j] for j in range(ny)]
    m1 = nw_coupling(rx, ry, rng)
    m2 = nw_coupling(rx, ry, rng)
    wa = rng.randint(0, 6)
    wb = rng.randint(0, 6 - wa)
    wc = 6 - wa - wb
    mass = [
        [
            (wa * m1[i][j] + wb * m2[i][j] + wc * rx[i] * ry[j]) / 6
            for j in range(ny)
        ]
        for i in range(nx)
    ]
    return cop.from_parts(xb, yb, mass)


def random_matrix(rng: random.Random, max_k: int = 6, max_l: int = 6) -> tm.TransformationMatrix:
    """Random valid transformation matrix with k, l >= 2."""
    k = rng.randint(2, max_k)
    l = rng.randint(2, max_l)
    vals = [[0] * l for _ in range(k)]
    for i in range(k):
        vals[i][rng.randrange(l)] += rng.randint(1, 9)
    for j in range(l):
        vals[rng.randrange(k)][j] += rng.randint(1, 9)
    for _ in range(rng.randint(0, k * l)):
        vals[rng.randrange(k)][rng.randrange(l)] += rng.randint(0, 9)
    total = sum(map(sum, vals))
    return tm.validate([[rat(v, total) for v in col] for col in vals])


def random_rank_one_matrix(rng: random.Random, max_blocks: int = 3) -> tm.TransformationMatrix:
    """Random matrix whose invariant pairs all have rank one, with interleaved
    column and row membership so blocks are not contiguous."""
    nb = rng.randint(1, max_blocks)
    k = nb + rng.randint(0, 3)
    l = nb + rng.randint(0, 3)
    colb = list(range(nb)) + [rng.randrange(nb) for _ in range(k - nb)]
    rowb = list(range(nb)) + [rng.randrange(nb) for _ in range(l - nb)]
    rng.shuffle(colb)
    rng.shuffle(rowb)
    u = [rng.randint(1, 9) for _ in range(k)]
    w = [rng.randint(1, 9) for _ in range(l)]
    scale = [rng.randint(1, 9) for _ in range(nb)]
    total = 0
    for n in range(nb):
        su = sum(u[i] for i in range(k) if colb[i] == n)
        sw = sum(w[j] for j in range(l) if rowb[j] == n)
        total += scale[n] * su * sw
    entries = [
        [
            rat(scale[colb[i]] * u[i] * w[j], total) if colb[i] == rowb[j] else ZERO
            for j in range(l)
        ]
        for i in range(k)
    ]
    return tm.validate(entries)


def sobolev_oracle(c: cop.PatchedCopula, d: cop.PatchedCopula):
    """Recompute the squared Sobolev distances from CDF values only.

    Partials are exact finite differences across refined cells (the CDFs are
    bilinear there) and the transverse integrals use Simpson's rule, exact for
    the quadratic integrand. Independent of sobolev_distance's code path.
    """
    xb = cop.merge_breaks(c.x_breaks, d.x_breaks)
    yb = cop.merge_breaks(c.y_breaks, d.y_breaks)

    def f(u, v):
        return cop.cdf(c, u, v) - cop.cdf(d, u, v)

    d1 = ZERO
    for i in range(len(xb) - 1):
        x0, x1 = xb[i], xb[i + 1]
        dx = x1 - x0
        for j in range(len(yb) - 1):
            y0, y1 = yb[j], yb[j + 1]
            dy = y1 - y0
            ym = (y0 + y1) / 2
            h0 = (f(x1, y0) - f(x0, y0)) / dx
            hm = (f(x1, ym) - f(x0, ym)) / dx
            h1 = (f(x1, y1) - f(x0, y1)) / dx
            d1 += dx * dy / 6 * (h0 * h0 + 4 * hm * hm + h1 * h1)
    d2 = ZERO
    for j in range(len(yb) - 1):
        y0, y1 = yb[j], yb[j + 1]
        dy = y1 - y0
        for i in range(len(xb) - 1):
            x0, x1 = xb[i], xb[i + 1]
            dx = x1 - x0
            xm = (x0 + x1) / 2
            h0 = (f(x0, y1) - f(x0, y0)) / dy
            hm = (f(xm, y1) - f(xm, y0)) / dy
            h1 = (f(x1, y1) - f(x1, y0)) / dy
            d2 += dy * dx / 6 * (h0 * h0 + 4 * hm * hm + h1 * h1)
    return d1, d2, d1 + d2


def left_copula(f: StepMap) -> cop.PatchedCopula:
    """Grid copula coupling a uniform x with its image under f.

    Its Markov operator composes step functions on the target mesh with f;
    its transpose's operator is the fiber average.
    """
    mass = [[ZERO] * f.n_target for _ in range(f.n_source)]
    for s in range(f.n_source):
        mass[s][f.assignment[s]] = f.source_breaks[s + 1] - f.source_breaks[s]
    return cop.from_parts(f.source_breaks, f.target_breaks, mass)


def random_psi(rng: random.Random, n: int, lo: int = -12, hi: int = 12):
    return tuple(rat(rng.randint(lo, hi), rng.randint(1, 9)) for _ in range(n))
