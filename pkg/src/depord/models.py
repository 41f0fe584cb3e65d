"""Closed-form order criteria and generators for concrete model families.

Bivariate Bernoulli models are ranked by a two-parameter closed form,
multivariate normal models by an explained-variance ratio, additive-error
models are verified numerically through the generic engine, and pointwise
cdf comparison of SI grids gives a sufficient criterion for copula-based
models.  Every closed form is cross-checked against the generic engine by
the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .ccx import ComparisonResult, ccx_compare
from .dist_core import (
    ATOL,
    ConditionalModel,
    DegenerateError,
    DiscreteMarginal,
    DomainError,
    _as_float_array,
    _readonly,
    model_from_joint_mass,
)
from .rearrange import DEFAULT_TOL, Verdict
from .reduce import BivariateSIGrid, concordance_leq, verify_si

# Spectral pseudo-inverse cutoff, relative to the largest eigenvalue.
_EIG_CUTOFF = 1e-10

# Exact convolution is used up to this many product atoms; larger inputs are
# quantile re-binned first.
_MAX_PRODUCT_ATOMS = 10_000


# ---------------------------------------------------------------------------
# Bivariate Bernoulli
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BernoulliParams:
    """Bivariate Bernoulli model: p = P(X=1), q = P(Y=1), and the conditional
    zero-probabilities alpha = P(Y=0 | X=0), beta = P(Y=0 | X=1)."""

    p: float
    q: float
    alpha: float
    beta: float

    def __post_init__(self):
        for name in ("p", "q"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise DomainError(f"{name} must lie in (0,1), got {v!r}")
        for name in ("alpha", "beta"):
            v = getattr(self, name)
            if not -ATOL <= v <= 1.0 + ATOL:
                raise DomainError(f"{name} must lie in [0,1], got {v!r}")
            object.__setattr__(self, name, float(min(max(v, 0.0), 1.0)))
        implied_q = (1.0 - self.p) * (1.0 - self.alpha) + self.p * (1.0 - self.beta)
        if abs(implied_q - self.q) > 1e-12:
            raise DomainError(
                f"inconsistent parameters: alpha/beta imply P(Y=1) = {implied_q!r}, got q = {self.q!r}"
            )


def bernoulli_to_model(params: BernoulliParams) -> ConditionalModel:
    """The 2x2 ConditionalModel of the parameters (cells: X=0 then X=1)."""
    marg = DiscreteMarginal([0.0, 1.0], [1.0 - params.q, params.q])
    weights = np.array([1.0 - params.p, params.p])
    F = np.array([[params.alpha, params.beta], [1.0, 1.0]])
    return ConditionalModel(marg, weights, F)


def bernoulli_ccx(a: BernoulliParams, b: BernoulliParams, tol: float = 1e-12) -> ComparisonResult:
    """Closed-form conditional convex order between Bernoulli models.

    With the marginal constraint q = q', the model with the wider spread of
    conditional zero-probabilities is the larger one: a <= b holds iff
    min(alpha', beta') <= min(alpha, beta) and max(alpha, beta) <= max(alpha',
    beta').  Agrees with the generic engine on the induced 2x2 models.
    """
    if abs(a.q - b.q) > tol:
        return ComparisonResult(Verdict.MARGINAL_MISMATCH, None, tol)
    lo_a, hi_a = min(a.alpha, a.beta), max(a.alpha, a.beta)
    lo_b, hi_b = min(b.alpha, b.beta), max(b.alpha, b.beta)
    leq = lo_b <= lo_a + tol and hi_a <= hi_b + tol
    geq = lo_a <= lo_b + tol and hi_b <= hi_a + tol
    if leq and geq:
        verdict = Verdict.EQUAL
    elif leq:
        verdict = Verdict.LESS_EQ
    elif geq:
        verdict = Verdict.GREATER_EQ
    else:
        verdict = Verdict.INCOMPARABLE
    return ComparisonResult(verdict, None, tol)


def bernoulli_classify(params: BernoulliParams, tol: float = 1e-12) -> frozenset[str]:
    """Closed-form structural flags of a Bernoulli model.

    Returns any of {"independent", "perfect", "comonotone", "countermonotone"}
    that apply (empty set when none do).  Perfect dependence implies one of
    the monotone couplings.
    """
    p, q, alpha, beta = params.p, params.q, params.alpha, params.beta
    flags = set()
    if abs(alpha - beta) <= tol:
        flags.add("independent")
    if min(alpha, beta) <= tol and max(alpha, beta) >= 1.0 - tol:
        flags.add("perfect")
    if abs(alpha - min((1.0 - q) / (1.0 - p), 1.0)) <= tol:
        flags.add("comonotone")
    if abs(alpha - max(0.0, 1.0 - q / (1.0 - p))) <= tol:
        flags.add("countermonotone")
    return frozenset(flags)


# ---------------------------------------------------------------------------
# Multivariate normal
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GaussianSpec:
    """A (1+p)-dimensional normal law with the response in coordinate 0."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = _as_float_array(self.mean, "mean")
        cov = _as_float_array(self.cov, "cov")
        if mean.ndim != 1 or mean.size < 2:
            raise DomainError("mean must be a vector of length 1+p with p >= 1")
        if cov.shape != (mean.size, mean.size):
            raise DomainError("cov must be square and aligned with mean")
        if np.max(np.abs(cov - cov.T)) > 1e-10:
            raise DomainError("cov must be symmetric within 1e-10")
        object.__setattr__(self, "mean", _readonly(mean))
        object.__setattr__(self, "cov", _readonly(0.5 * (cov + cov.T)))

    @property
    def sigma2_y(self) -> float:
        return float(self.cov[0, 0])

    @property
    def cov_yx(self) -> np.ndarray:
        return self.cov[0, 1:]

    @property
    def cov_x(self) -> np.ndarray:
        return self.cov[1:, 1:]


def gaussian_r2(spec: GaussianSpec) -> float:
    """Explained-variance ratio of a normal model, via a spectral pseudo-inverse.

    Eigenvalues of the predictor covariance below 1e-10 of the largest are
    zeroed.  The cross-covariance must lie in the row space of the predictor
    covariance (it does for any genuine covariance matrix; violations raise).
    The result is clamped to [0, 1] with 1e-9 slack.
    """
    if spec.sigma2_y <= 0.0:
        raise DegenerateError("gaussian r^2 undefined for degenerate Y (sigma_Y^2 = 0)")
    vals, vecs = np.linalg.eigh(spec.cov_x)
    scale = max(vals.max(), 0.0)
    keep = vals > _EIG_CUTOFF * scale if scale > 0 else np.zeros_like(vals, dtype=bool)
    coeffs = vecs.T @ spec.cov_yx
    dropped = coeffs[~keep]
    norm_v = np.linalg.norm(spec.cov_yx)
    if dropped.size and np.linalg.norm(dropped) > 1e-8 * max(norm_v, 1.0):
        raise DomainError("cov is not a valid covariance: cross-covariance leaves the predictor row space")
    r2 = float(np.sum(coeffs[keep] ** 2 / vals[keep]) / spec.sigma2_y)
    if r2 < -1e-9 or r2 > 1.0 + 1e-9:
        raise DomainError(f"explained-variance ratio {r2!r} outside [0,1]: cov is not positive semi-definite")
    return min(max(r2, 0.0), 1.0)


def gaussian_ccx(a: GaussianSpec, b: GaussianSpec, tol: float = DEFAULT_TOL) -> ComparisonResult:
    """Conditional convex order between normal models: compare r^2 values.

    Normal models are always comparable (never Incomparable, and continuous
    marginals share their range closure, so never MarginalMismatch).
    """
    ra, rb = gaussian_r2(a), gaussian_r2(b)
    if abs(ra - rb) <= tol:
        verdict = Verdict.EQUAL
    elif ra < rb:
        verdict = Verdict.LESS_EQ
    else:
        verdict = Verdict.GREATER_EQ
    return ComparisonResult(verdict, None, tol)


def _gl_nodes(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w  # mapped to (0,1)


def gaussian_discretize(
    spec: GaussianSpec,
    n_cells: int = 50,
    n_levels: int = 50,
    mc_samples: int | None = None,
    seed: int = 0,
) -> ConditionalModel:
    """Checkerboard discretization of the bivariate law of (Y, S).

    S is the standardized sufficient linear score of the predictors, so
    (Y, S) is bivariate normal with correlation sqrt(r^2) and carries the
    whole conditional law of Y given X.  Cells are S-quantile intervals and
    levels are Y-quantile intervals, both of equal probability.  By default
    the rectangle masses come from analytic conditional-normal cdfs through
    fixed Gauss-Legendre quadrature (deterministic, no sampling); passing
    ``mc_samples`` switches to Monte Carlo with a counter-based generator
    keyed by the seed, so results are reproducible for any parallel layout.
    """
    if n_cells < 1 or n_levels < 2:
        raise DomainError("need n_cells >= 1 and n_levels >= 2")
    r = float(np.sqrt(gaussian_r2(spec)))
    sigma_y = float(np.sqrt(spec.sigma2_y))
    mu_y = float(spec.mean[0])
    y_atoms = mu_y + sigma_y * norm.ppf((np.arange(n_levels) + 0.5) / n_levels)

    if mc_samples is not None:
        rng = np.random.Generator(np.random.Philox(key=seed))
        z1 = rng.standard_normal(mc_samples)
        z2 = rng.standard_normal(mc_samples)
        ys = r * z1 + np.sqrt(max(1.0 - r * r, 0.0)) * z2
        u = norm.cdf(z1)
        v = norm.cdf(ys)
        cells = np.minimum((u * n_cells).astype(int), n_cells - 1)
        levels = np.minimum((v * n_levels).astype(int), n_levels - 1)
        counts = np.zeros((n_levels, n_cells))
        np.add.at(counts, (levels, cells), 1.0)
        return model_from_joint_mass(counts, y_atoms=y_atoms)

    z_levels = norm.ppf(np.arange(1, n_levels) / n_levels)
    nodes, weights = _gl_nodes(32)
    u = (np.arange(n_cells)[:, None] + nodes[None, :]) / n_cells  # (cells, nodes)
    if r >= 1.0 - 1e-14:
        cdf_levels = (norm.ppf(u)[:, :, None] <= z_levels[None, None, :]).astype(float)
    else:
        s = norm.ppf(u)
        arg = (z_levels[None, None, :] - r * s[:, :, None]) / np.sqrt(1.0 - r * r)
        cdf_levels = norm.cdf(arg)
    # R[k, l] = P(Y <= y-quantile l, S in cell k), by quadrature over the cell
    R = np.einsum("knl,n->kl", cdf_levels, weights) / n_cells
    R = np.concatenate((np.zeros((n_cells, 1)), R, np.full((n_cells, 1), 1.0 / n_cells)), axis=1)
    mass = np.diff(R, axis=1).T  # (levels, cells)
    mass = np.maximum(mass, 0.0)
    return model_from_joint_mass(mass, y_atoms=y_atoms)


# ---------------------------------------------------------------------------
# Additive error models
# ---------------------------------------------------------------------------


def _rebin_marginal(m: DiscreteMarginal, max_atoms: int) -> DiscreteMarginal:
    if m.n_atoms <= max_atoms:
        return m
    edges = np.arange(1, max_atoms) / max_atoms
    idx = np.searchsorted(m.cdf_values, edges, side="left")
    idx = np.concatenate((idx, [m.n_atoms - 1]))
    probs = np.diff(np.concatenate(([0.0], m.cdf_values[idx])))
    keep = probs > 0
    return DiscreteMarginal(m.atoms[idx][keep], probs[keep])


def _additive_model(f_values: DiscreteMarginal, eps: DiscreteMarginal, sigma: float, n_levels: int) -> ConditionalModel:
    """Exact model of (f(X) + sigma*eps, f(X)) on a uniform shared level grid.

    The convolution is an exact atom-pair enumeration.  Continuity of the
    response is emulated by the distributional transform: each atom's mass is
    spread uniformly over its cdf jump interval, after which binning to
    ``n_levels`` equal-probability levels is exact and every sigma lands on
    the same range closure {l/n}.  The cell partition is the law of f(X),
    which is sufficient for the conditional distribution.
    """
    if f_values.n_atoms * eps.n_atoms > _MAX_PRODUCT_ATOMS:
        budget = int(np.sqrt(_MAX_PRODUCT_ATOMS))
        f_values = _rebin_marginal(f_values, budget)
        eps = _rebin_marginal(eps, budget)
    f_atoms, f_probs = f_values.atoms, f_values.probs
    n_cells = f_atoms.size
    if sigma == 0.0:
        atoms, inverse = np.unique(f_atoms, return_inverse=True)
        cond_mass = np.zeros((atoms.size, n_cells))
        cond_mass[inverse, np.arange(n_cells)] = 1.0
    else:
        y = (f_atoms[:, None] + sigma * eps.atoms[None, :]).ravel()
        pair_mass = np.repeat(eps.probs[None, :], n_cells, axis=0).ravel()
        cell_of = np.repeat(np.arange(n_cells), eps.n_atoms)
        atoms, inverse = np.unique(y, return_inverse=True)
        cond_mass = np.zeros((atoms.size, n_cells))
        np.add.at(cond_mass, (inverse, cell_of), pair_mass)
    marg_mass = cond_mass @ f_probs
    lower = np.cumsum(marg_mass) - marg_mass  # marginal cdf just below each atom

    levels = np.arange(1, n_levels + 1) / n_levels
    # fraction of each atom's jump interval lying below each level
    frac = np.clip((levels[None, :] - lower[:, None]) / marg_mass[:, None], 0.0, 1.0)
    # G[l, i] = sum_r cond_mass[r, i] * frac[r, l]
    G = np.einsum("ri,rl->li", cond_mass, frac)
    G[-1] = 1.0
    marg = DiscreteMarginal((np.arange(n_levels) + 0.5) / n_levels, np.full(n_levels, 1.0 / n_levels))
    return ConditionalModel(marg, f_probs, G)


def additive_error_verify(
    f_values: DiscreteMarginal,
    eps: DiscreteMarginal,
    sigmas,
    n_levels: int = 60,
    tol: float = DEFAULT_TOL,
) -> list[ComparisonResult]:
    """Verify that noisier additive-error models rank lower, pair by pair.

    Builds the exact model of (f(X) + sigma*eps, f(X)) for each sigma on a
    shared uniform level grid and returns ccx_compare(model of the larger
    sigma, model of the smaller sigma) for every consecutive pair; the
    expected verdict is LessEq throughout.
    """
    sig = _as_float_array(sigmas, "sigmas")
    if sig.ndim != 1 or sig.size < 2:
        raise DomainError("need an ascending list of at least two sigmas")
    if np.any(sig < 0) or np.any(np.diff(sig) <= 0):
        raise DomainError("sigmas must be nonnegative and strictly ascending")
    models = [_additive_model(f_values, eps, float(s), n_levels) for s in sig]
    return [ccx_compare(models[i + 1], models[i], tol) for i in range(len(models) - 1)]


# ---------------------------------------------------------------------------
# SI copula criterion
# ---------------------------------------------------------------------------


def si_copula_ccx(ca: BivariateSIGrid, cb: BivariateSIGrid, tol: float = DEFAULT_TOL) -> ComparisonResult:
    """Sufficient criterion for copula-based models: compare SI grids pointwise.

    For models driven by sufficient scores whose copulas with the response
    are SI, a pointwise cdf ordering of those copulas implies the conditional
    convex order of the full models.  The verdict is labeled
    ``sufficient-criterion``: a LessEq here implies ccx LessEq, but
    incomparability of the grids decides nothing.
    """
    for name, grid in (("first", ca), ("second", cb)):
        if not verify_si(grid, tol):
            raise DomainError(f"{name} grid is not stochastically increasing")
    res = concordance_leq(ca, cb, tol)
    return ComparisonResult(res.verdict, res.witness, res.tol, res.per_level, note="sufficient-criterion")
