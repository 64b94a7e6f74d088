"""Factorization of patched copulas through complete-dependence factors.

A transformation matrix whose invariant-pair blocks all have rank one splits
as L times R (block by block, up to block mass): L keeps one nonzero per
column, R one nonzero per row. Patching distributes over the star product
along this split, so the invariant copula of A factors as the star product of
the invariant copulas of L and R; at every finite depth the identity

    star(iterate(L, seed1, d), iterate(R, seed2, d)) = iterate(A, seed, d)

holds exactly when the seeds satisfy it (independence does). The L-factor is
left invertible in the operator sense: star(transpose(CL), CL) collapses to
the conditional-expectation copula of CL's sigma-atom partition.
"""

from __future__ import annotations

from dataclasses import dataclass

from .copula import (
    PatchedCopula,
    block_diagonal,
    independence,
    same_measure,
    star,
    transpose,
)
from .errors import VerificationError
from .markov import sigma_atoms
from .patch import apply, iterate
from .tmatrix import TransformationMatrix, invariant_pairs, rank_one_factorize


def build_lr(t: TransformationMatrix):
    """Decompose and rank-one factorize in one call; returns ``(L, R)``.

    Raises RankExceedsOne when some invariant pair has rank above one.
    """
    return rank_one_factorize(invariant_pairs(t))


def product_identity_check(
    t: TransformationMatrix, c1: PatchedCopula, c2: PatchedCopula
) -> bool:
    """Does ``[L](c1) * [R](c2)`` equal ``[t](c1 * c2)`` as measures?

    True for every pair whenever t's blocks are rank one; this is the exact
    finite-depth form of the factorization of the invariant copula.
    """
    left, right = build_lr(t)
    lhs = star(apply(left, c1), apply(right, c2))
    rhs = apply(t, star(c1, c2))
    return same_measure(lhs, rhs)


def factor_fixpoints(t: TransformationMatrix, depth: int):
    """Depth-d iterates ``(CL, CR, CA)`` from the independence seed.

    Verifies ``star(CL, CR) = CA`` exactly before returning; a mismatch
    raises VerificationError (it would mean a rank-one block factorized
    inconsistently, which cannot happen for validated input).
    """
    left, right = build_lr(t)
    seed = independence()
    cl = iterate(left, seed, depth)
    cr = iterate(right, seed, depth)
    ca = iterate(t, seed, depth)
    if not same_measure(star(cl, cr), ca):
        raise VerificationError(
            "star of the depth-%d factor iterates differs from the depth-%d "
            "iterate of the full matrix" % (depth, depth)
        )
    return cl, cr, ca


@dataclass(frozen=True)
class LeftInvertReport:
    """Outcome of the left-invertibility check.

    ``parts`` lists the y-cell indices of each sigma-atom of the checked
    copula; ``product`` is the exact star(transpose(C), C); ``passed`` says
    whether the product equals the conditional-expectation copula of the
    partition.
    """

    passed: bool
    parts: tuple[tuple[int, ...], ...]
    product: PatchedCopula
    expected: PatchedCopula


def left_invertibility_check(cl: PatchedCopula) -> LeftInvertReport:
    """Check ``star(transpose(cl), cl)`` against the block-diagonal uniform.

    For a left-invertible grid copula (one support cell per x-cell) the
    product is exactly the conditional-expectation copula of the partition of
    the y-mesh into sigma-atom y-sides: the operator of cl composes a step
    function with a map, and the adjoint then averages it back, losing
    nothing. A copula without that structure fails the comparison.
    """
    atoms = sigma_atoms(cl)
    parts = tuple(tuple(sorted(a.y_cells.members)) for a in atoms)
    product = star(transpose(cl), cl)
    expected = block_diagonal(cl.y_breaks, parts)
    return LeftInvertReport(
        passed=same_measure(product, expected),
        parts=parts,
        product=product,
        expected=expected,
    )
