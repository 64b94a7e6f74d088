"""Exact computations with self-similar bivariate copulas.

The package works entirely in rational arithmetic: transformation matrices
patch copulas into affinely squeezed copies of themselves, the iteration
contracts in a modified Sobolev norm toward an invariant copula with fractal
support, and rank-one structure of the matrix splits that copula into a star
product of complete-dependence factors. Markov operator tools make the
dependence structure inspectable, and renderers turn any piecewise-uniform
copula into PGM images or CSV cell lists.

The most used names are re-exported here; the submodules hold the rest:
``tmatrix``, ``copula``, ``patch``, ``markov``, ``factorize``, ``io``,
``cli``, ``catalog``.
"""

from ._rat import BACKEND, Rat, rat
from .copula import (
    PatchedCopula,
    antidiagonal,
    cdf,
    convex,
    diagonal,
    from_parts,
    independence,
    same_measure,
    sobolev_distance,
    star,
    sup_distance,
    transpose,
)
from .errors import FractalCopulaError
from .factorize import build_lr, factor_fixpoints, left_invertibility_check, product_identity_check
from .markov import (
    CellSet,
    StepMap,
    build_implicit_pair,
    graph_mass,
    operator_apply,
    operator_apply_adjoint,
    sigma_atoms,
    verify_markov_factorization,
)
from .patch import apply, fixpoint, iterate, support_cells
from .tmatrix import (
    Decomposition,
    TransformationMatrix,
    complete_dependence_kind,
    contraction_factor,
    from_rows,
    invariant_pairs,
    rank_one_factorize,
    scaling_factors,
    validate,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Rat",
    "rat",
    "PatchedCopula",
    "antidiagonal",
    "cdf",
    "convex",
    "diagonal",
    "from_parts",
    "independence",
    "same_measure",
    "sobolev_distance",
    "star",
    "sup_distance",
    "transpose",
    "FractalCopulaError",
    "build_lr",
    "factor_fixpoints",
    "left_invertibility_check",
    "product_identity_check",
    "CellSet",
    "StepMap",
    "build_implicit_pair",
    "graph_mass",
    "operator_apply",
    "operator_apply_adjoint",
    "sigma_atoms",
    "verify_markov_factorization",
    "apply",
    "fixpoint",
    "iterate",
    "support_cells",
    "Decomposition",
    "TransformationMatrix",
    "complete_dependence_kind",
    "contraction_factor",
    "from_rows",
    "invariant_pairs",
    "rank_one_factorize",
    "scaling_factors",
    "validate",
    "__version__",
]
