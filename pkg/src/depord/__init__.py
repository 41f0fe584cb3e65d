"""depord: the conditional convex order for dependence models.

A finite model of a response Y and predictors X is compared to another by the
variability, level by level, of its conditional distribution across predictor
cells.  The package decides that order with three mutually verifying engines
(Schur rearrangement, concordance of the reduced SI grid, brute-force convex
order), reduces any model to a bivariate stochastically increasing grid, and
computes the family of dependence measures that are monotone in the order,
with closed-form fast paths for Bernoulli and Gaussian models and exact
desk-scale verification for additive-error models.
"""

from .ccx import (
    ComparisonResult,
    LevelDetail,
    Verdict,
    Witness,
    ccx_compare,
    is_independent,
    is_perfect,
    marginalize_cells,
)
from .dist_core import (
    ConditionalModel,
    DegenerateError,
    DepordError,
    DiscreteMarginal,
    DomainError,
    StepFunction,
    from_samples,
    independent_model,
    marginal_constraint,
    model_from_joint_mass,
    perfect_model,
    quantile,
    range_closure,
    read_csv_model,
)
from .measures import (
    PhiSpec,
    chatterjee_xi,
    integrated_r2_nu,
    lambda_phi,
    rearranged_measure,
    xi_phi,
)
from .models import (
    BernoulliParams,
    GaussianSpec,
    additive_error_verify,
    bernoulli_ccx,
    bernoulli_classify,
    bernoulli_to_model,
    gaussian_ccx,
    gaussian_discretize,
    gaussian_r2,
    si_copula_ccx,
)
from .oracle import ccx_bruteforce, convex_order_bruteforce, law_of, xi_bruteforce
from .rearrange import (
    SchurResult,
    decreasing_rearrangement,
    integrated_rearrangement,
    schur_leq,
)
from .reduce import (
    BivariateSIGrid,
    ccx_via_concordance,
    concordance_leq,
    grid_to_model,
    reduce_to_si,
    self_equivalence,
    si_mass_matrix,
    verify_si,
)

__version__ = "0.1.0"

__all__ = [
    "BernoulliParams",
    "BivariateSIGrid",
    "ComparisonResult",
    "ConditionalModel",
    "DegenerateError",
    "DepordError",
    "DiscreteMarginal",
    "DomainError",
    "GaussianSpec",
    "LevelDetail",
    "PhiSpec",
    "SchurResult",
    "StepFunction",
    "Verdict",
    "Witness",
    "additive_error_verify",
    "bernoulli_ccx",
    "bernoulli_classify",
    "bernoulli_to_model",
    "ccx_bruteforce",
    "ccx_compare",
    "ccx_via_concordance",
    "chatterjee_xi",
    "concordance_leq",
    "convex_order_bruteforce",
    "decreasing_rearrangement",
    "from_samples",
    "gaussian_ccx",
    "gaussian_discretize",
    "gaussian_r2",
    "grid_to_model",
    "independent_model",
    "integrated_r2_nu",
    "integrated_rearrangement",
    "is_independent",
    "is_perfect",
    "lambda_phi",
    "law_of",
    "marginal_constraint",
    "marginalize_cells",
    "model_from_joint_mass",
    "perfect_model",
    "quantile",
    "range_closure",
    "read_csv_model",
    "rearranged_measure",
    "reduce_to_si",
    "schur_leq",
    "self_equivalence",
    "si_copula_ccx",
    "si_mass_matrix",
    "verify_si",
    "xi_bruteforce",
    "xi_phi",
]
