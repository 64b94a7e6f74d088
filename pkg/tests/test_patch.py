"""Patching operator, iteration, and the certified fixed-point search."""

import random

import pytest

import helpers as H
from fractalcopula import catalog as cat
from fractalcopula import copula as cop
from fractalcopula import patch
from fractalcopula import tmatrix as tm
from fractalcopula._rat import ONE, ZERO, rat
from fractalcopula.errors import NoContraction, OutOfRange


PI = cop.independence()


def test_apply_once_matches_matrix():
    """[A]Pi is the matrix itself read as a piecewise-uniform measure."""
    c = patch.apply(cat.A2, PI)
    assert c.x_breaks == cat.A2.p
    assert c.y_breaks == cat.A2.q
    assert c.mass == cat.A2.entries


def test_apply_preserves_invariants():
    rng = random.Random(21)
    for _ in range(25):
        t = H.random_matrix(rng)
        c = H.random_copula(rng, max_cells=5)
        cop.check_invariants(patch.apply(t, c))


def test_apply_scaling_equality():
    """Squared Sobolev components scale by the exact factors s1 and s2."""
    rng = random.Random(22)
    for t in (cat.A1, cat.A2, cat.A3):
        s1, s2 = tm.scaling_factors(t)
        for _ in range(5):
            xb = H.rand_breaks(rng, 6)
            yb = H.rand_breaks(rng, 6)
            c = H.random_copula(rng, x_breaks=xb, y_breaks=yb)
            d = H.random_copula(rng, x_breaks=xb, y_breaks=yb)
            d1, d2, _ = cop.sobolev_distance(c, d)
            a1, a2, _ = cop.sobolev_distance(patch.apply(t, c), patch.apply(t, d))
            assert a1 == s1 * d1
            assert a2 == s2 * d2


def test_iterate_depths():
    assert patch.iterate(cat.A2, PI, 0) == PI
    two = patch.iterate(cat.A2, PI, 2)
    assert two == patch.apply(cat.A2, patch.apply(cat.A2, PI))
    assert two.nx == 9 and two.ny == 9
    with pytest.raises(OutOfRange):
        patch.iterate(cat.A2, PI, -1)


def test_iterate_mesh_growth():
    for d in range(4):
        c = patch.iterate(cat.A3, PI, d)
        assert c.nx == 3 ** d


def test_support_cells_count():
    """Five nonzero entries in A2 give 5^d support cells at depth d."""
    for d in range(3):
        c = patch.iterate(cat.A2, PI, d)
        assert len(patch.support_cells(c)) == 5 ** d


def test_first_step_distances():
    known = {
        "a1": (rat(1, 24), rat(1, 24), rat(1, 12)),
        "a2": (rat(1, 54), rat(1, 54), rat(1, 27)),
        "a3": (rat(13, 700), rat(61, 2800), rat(113, 2800)),
    }
    for name, want in known.items():
        t = cat.NAMED[name]
        assert cop.sobolev_distance(patch.apply(t, PI), PI) == want


def test_fixpoint_converges():
    r = patch.fixpoint(cat.A2, tol=rat(1, 100))
    assert r.converged
    assert r.depth == 5
    assert r.r_squared == rat(2, 9)
    assert r.step_dssq == rat(16, 177147)
    assert r.copula.nx == 3 ** 5


def test_fixpoint_steps_scale_exactly():
    r = patch.fixpoint(cat.A2, tol=rat(1, 100))
    for (p1, p2, _), (n1, n2, _) in zip(r.steps, r.steps[1:]):
        assert n1 == rat(2, 9) * p1
        assert n2 == rat(2, 9) * p2


def test_fixpoint_budget_exhausted():
    r = patch.fixpoint(cat.A2, max_depth=3, tol=rat(1, 10 ** 6))
    assert not r.converged
    assert r.depth == 3
    assert len(r.steps) == 3


def test_fixpoint_apriori_bound_positive():
    r = patch.fixpoint(cat.A1, tol=rat(1, 10))
    assert r.apriori_bound > 0.0
    # Banach bound dominates the true remaining drift: compare to next step
    nxt = patch.apply(cat.A1, r.copula)
    step = cop.sobolev_distance(r.copula, nxt)[2]
    assert float(step) < r.apriori_bound ** 2


def test_fixpoint_fixed_seed_is_instant():
    """Seeding with the exact fixed point converges in one step.

    [A](C_A) = C_A holds for the invariant copula; a seed equal to a deep
    iterate is not exactly invariant, so use the one matrix whose fixed point
    has a finite mesh: the 2x2 checkerboard fixes Pi... which is the seed.
    """
    t = tm.validate([[rat(1, 4), rat(1, 4)], [rat(1, 4), rat(1, 4)]])
    r = patch.fixpoint(t)
    assert r.converged
    assert r.depth == 1
    assert r.step_dssq == ZERO
    assert cop.same_measure(r.copula, PI)


def test_fixpoint_degenerate_raises():
    with pytest.raises(NoContraction):
        patch.fixpoint(tm.validate([[rat(1, 2)], [rat(1, 2)]]), max_depth=3)
    with pytest.raises(NoContraction):
        patch.fixpoint(tm.validate([[rat(1, 2), rat(1, 2)]]), max_depth=3)
    with pytest.raises(NoContraction):
        patch.fixpoint(tm.validate([[ONE]]), max_depth=2)


def test_fixpoint_rejects_bad_tol():
    with pytest.raises(OutOfRange):
        patch.fixpoint(cat.A2, tol=ZERO)
    with pytest.raises(OutOfRange):
        patch.fixpoint(cat.A2, max_depth=0)


def test_fixpoint_seed_invariance_direction():
    """Different seeds drift toward the same invariant copula."""
    a = patch.fixpoint(cat.A2, seed=PI, tol=rat(1, 10))
    b = patch.fixpoint(cat.A2, seed=cop.diagonal(2), tol=rat(1, 10))
    gap = cop.sobolev_distance(a.copula, b.copula)[2]
    start = cop.sobolev_distance(PI, cop.diagonal(2))[2]
    assert gap < start
