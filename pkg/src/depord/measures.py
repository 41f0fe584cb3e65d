"""Dependence measures that are monotone in the conditional convex order.

All measures live on [0, 1] with 0 at independence and 1 at perfect
functional dependence, and none of them can decrease when predictors are
added.  Two families are provided:

* convexity-generated measures: Chatterjee's xi, the phi-divergence family
  xi_phi (conditional vs unconditional cdf), the sensitivity family
  lambda_phi (conditional cdf vs conditional cdf), and the integrated R^2
  variant nu;
* rearrangement-generated measures: classical concordance measures
  (Spearman, Kendall, Gini) evaluated on the reduced bivariate SI grid
  interpreted as a checkerboard copula; these require a uniform-like Y
  marginal (equal atom probabilities), mirroring the continuous-response
  setting in which they are defined.

Every per-atom computation is an exact finite sum; nothing is sampled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dist_core import ConditionalModel, DegenerateError, DomainError, _as_float_array
from .reduce import BivariateSIGrid, reduce_to_si

_NORMALIZER_TOL = 1e-12


@dataclass(frozen=True)
class PhiSpec:
    """A convex test function phi: [-1, 1] -> R with phi(0) = 0.

    Built through the classmethods; ``kind`` is one of ``square``, ``abs``,
    ``power`` (exponent k >= 1) or ``piecewise_linear`` (interior breakpoints
    plus nondecreasing slopes, integrated from 0 so that phi(0) = 0).
    """

    kind: str
    power_k: float | None = None
    breaks: tuple[float, ...] = ()
    slopes: tuple[float, ...] = ()

    @classmethod
    def square(cls) -> "PhiSpec":
        return cls("square")

    @classmethod
    def abs(cls) -> "PhiSpec":
        return cls("abs")

    @classmethod
    def power(cls, k: float) -> "PhiSpec":
        if not k >= 1.0:
            raise DomainError("power exponent must satisfy k >= 1")
        return cls("power", power_k=float(k))

    @classmethod
    def piecewise_linear(cls, breaks, slopes) -> "PhiSpec":
        br = tuple(float(b) for b in breaks)
        sl = tuple(float(s) for s in slopes)
        if len(sl) != len(br) + 1:
            raise DomainError("need one slope per interval: len(slopes) = len(breaks) + 1")
        if any(b2 <= b1 for b1, b2 in zip(br, br[1:])):
            raise DomainError("breaks must be strictly increasing")
        if any(not -1.0 < b < 1.0 for b in br):
            raise DomainError("breaks must lie inside (-1, 1)")
        if any(s2 < s1 for s1, s2 in zip(sl, sl[1:])):
            raise DomainError("slopes must be nondecreasing (convexity)")
        return cls("piecewise_linear", breaks=br, slopes=sl)

    def __call__(self, x) -> np.ndarray:
        t = np.asarray(x, dtype=float)
        if self.kind == "square":
            return t * t
        if self.kind == "abs":
            return np.abs(t)
        if self.kind == "power":
            return np.abs(t) ** self.power_k
        # piecewise linear: phi(x) = integral of the slope step function from 0
        edges = np.array((-1.0,) + self.breaks + (1.0,))
        slopes = np.array(self.slopes)
        knots = np.zeros(edges.size)  # phi at the edges
        origin = int(np.searchsorted(edges, 0.0, side="right") - 1)
        for i in range(origin, edges.size - 1):
            knots[i + 1] = knots[i] + slopes[i] * (edges[i + 1] - max(edges[i], 0.0))
        for i in range(origin, -1, -1):
            top_val = 0.0 if i == origin else knots[i + 1]
            knots[i] = top_val - slopes[i] * (min(edges[i + 1], 0.0) - edges[i])
        idx = np.clip(np.searchsorted(edges, t, side="right") - 1, 0, slopes.size - 1)
        return knots[idx] + slopes[idx] * (t - edges[idx])

    @property
    def strictly_convex(self) -> bool:
        if self.kind == "square":
            return True
        if self.kind == "power":
            return self.power_k > 1.0
        return False

    @property
    def strictly_convex_at_zero(self) -> bool:
        if self.kind in ("square", "abs", "power"):
            return True
        s = self._slope_jump_at_zero()
        return s[1] > s[0]

    def _slope_jump_at_zero(self) -> tuple[float, float]:
        edges = np.array((-1.0,) + self.breaks + (1.0,))
        slopes = np.array(self.slopes)
        left = slopes[int(np.searchsorted(edges, 0.0, side="left") - 1)]
        right = slopes[int(np.searchsorted(edges, 0.0, side="right") - 1)]
        return float(left), float(right)


def _require_nondegenerate(model: ConditionalModel, what: str):
    if model.n_atoms < 2:
        raise DegenerateError(f"{what} undefined for degenerate Y")


def chatterjee_xi(model: ConditionalModel) -> float:
    """Chatterjee's rank correlation of the model, as an exact finite sum.

    Per atom a_j the variability of the conditional cdf across cells is set
    against its maximum: the numerator averages Var(P(Y <= a_j | cell)) under
    the Y law, the denominator averages Var(1{Y <= a_j}); the top atom
    contributes zero to both.  0 at independence, 1 at perfect dependence.
    """
    _require_nondegenerate(model, "xi")
    F = model.cond_cdf
    w = model.cell_weights
    p = model.y_marginal.probs
    Fy = model.y_marginal.cdf_values
    cond_var = F * F @ w - (F @ w) ** 2
    numer = float(p @ cond_var)
    denom = float(p @ (Fy * (1.0 - Fy)))
    if denom <= _NORMALIZER_TOL:
        raise DegenerateError("xi undefined for degenerate Y")
    return numer / denom


def xi_phi(model: ConditionalModel, phi: PhiSpec) -> float:
    """Measure of dependence: normalized phi-distance of conditional to
    unconditional cdfs.  Equals chatterjee_xi for phi = square."""
    _require_nondegenerate(model, "xi_phi")
    p = model.y_marginal.probs
    Fy = model.y_marginal.cdf_values
    alpha = float(p @ (Fy * phi(1.0 - Fy) + (1.0 - Fy) * phi(-Fy)))
    if alpha <= _NORMALIZER_TOL:
        raise DegenerateError("degenerate normalizer alpha_phi")
    inner = phi(model.cond_cdf - Fy[:, None]) @ model.cell_weights
    return float(p @ inner) / alpha


def lambda_phi(model: ConditionalModel, phi: PhiSpec) -> float:
    """Measure of sensitivity: normalized phi-distance between conditional
    cdfs at independently drawn cells.  Equals chatterjee_xi for phi = square."""
    _require_nondegenerate(model, "lambda_phi")
    p = model.y_marginal.probs
    Fy = model.y_marginal.cdf_values
    beta = float(p @ (Fy * (1.0 - Fy))) * (float(phi(1.0)) + float(phi(-1.0)))
    if beta <= _NORMALIZER_TOL:
        raise DegenerateError("degenerate normalizer beta_phi")
    F = model.cond_cdf
    w = model.cell_weights
    total = 0.0
    for j in range(model.n_atoms):
        diff = F[j][:, None] - F[j][None, :]
        total += p[j] * float(w @ phi(diff) @ w)
    return total / beta


def integrated_r2_nu(model: ConditionalModel) -> float:
    """Integrated R^2: the per-atom variance ratio averaged under the Y law
    restricted to the support without its maximum atom (renormalized)."""
    _require_nondegenerate(model, "nu")
    F = model.cond_cdf[:-1]
    w = model.cell_weights
    p = model.y_marginal.probs
    Fy = model.y_marginal.cdf_values[:-1]
    cond_var = F * F @ w - (F @ w) ** 2
    ratios = cond_var / (Fy * (1.0 - Fy))
    weights = p[:-1] / (1.0 - p[-1])
    return float(weights @ ratios)


# ---------------------------------------------------------------------------
# Rearrangement-generated measures on checkerboard grids
# ---------------------------------------------------------------------------


def _require_uniform_y(model: ConditionalModel):
    p = model.y_marginal.probs
    if np.max(np.abs(p - 1.0 / p.size)) > 1e-8:
        raise DomainError(
            "rearranged measures need a uniform-like Y marginal "
            "(equal atom probabilities); re-bin the response first"
        )


def _corner_cdf(grid: BivariateSIGrid) -> np.ndarray:
    """Joint cdf of the checkerboard copula at all cell corners,
    shape (m+1, K+1) with v along axis 0 and u along axis 1."""
    mass = np.diff(grid.G, axis=0, prepend=0.0) * grid.widths
    H = np.zeros((mass.shape[0] + 1, mass.shape[1] + 1))
    H[1:, 1:] = np.cumsum(np.cumsum(mass, axis=0), axis=1)
    return H


def _corner_average(H: np.ndarray) -> np.ndarray:
    return 0.25 * (H[:-1, :-1] + H[:-1, 1:] + H[1:, :-1] + H[1:, 1:])


def _checkerboard_spearman(grid: BivariateSIGrid) -> float:
    # C is bilinear within each cell, so the cell average of C is the mean of
    # its four corner values and 12 * int C - 3 is exact.
    H = _corner_cdf(grid)
    dv = grid.y_marginal.probs[:, None]
    du = grid.widths[None, :]
    return float(12.0 * np.sum(dv * du * _corner_average(H)) - 3.0)


def _checkerboard_kendall(grid: BivariateSIGrid) -> float:
    # tau = 4 E[C(U,V)] - 1 with (U,V) distributed by the checkerboard mass;
    # uniform cell mass against a bilinear C averages to the corner mean.
    mass = np.diff(grid.G, axis=0, prepend=0.0) * grid.widths
    H = _corner_cdf(grid)
    return float(4.0 * np.sum(mass * _corner_average(H)) - 1.0)


def _cdf_on_line(grid: BivariateSIGrid, us: np.ndarray, vs: np.ndarray) -> np.ndarray:
    """Copula cdf of the checkerboard at points (us, vs), exact bilinear."""
    H = _corner_cdf(grid)
    vb = np.concatenate(([0.0], grid.y_marginal.cdf_values))
    ub = grid.u_breaks
    j = np.clip(np.searchsorted(vb, vs, side="right") - 1, 0, vb.size - 2)
    k = np.clip(np.searchsorted(ub, us, side="right") - 1, 0, ub.size - 2)
    fv = (vs - vb[j]) / (vb[j + 1] - vb[j])
    fu = (us - ub[k]) / (ub[k + 1] - ub[k])
    return (
        (1 - fv) * (1 - fu) * H[j, k]
        + (1 - fv) * fu * H[j, k + 1]
        + fv * (1 - fu) * H[j + 1, k]
        + fv * fu * H[j + 1, k + 1]
    )


def _section_integral(grid: BivariateSIGrid, anti: bool) -> float:
    """Exact integral of u -> C(u, u) (or C(u, 1-u) when ``anti``)."""
    vb = np.concatenate(([0.0], grid.y_marginal.cdf_values))
    vcuts = (1.0 - vb) if anti else vb
    cuts = np.unique(np.clip(np.concatenate((grid.u_breaks, vcuts)), 0.0, 1.0))
    lo, hi = cuts[:-1], cuts[1:]
    mid = 0.5 * (lo + hi)
    points = np.concatenate((lo, mid, hi))
    vs = (1.0 - points) if anti else points
    c = _cdf_on_line(grid, points, vs)
    n = lo.size
    # C along the line is quadratic on each segment: Simpson is exact.
    return float(np.sum((hi - lo) / 6.0 * (c[:n] + 4.0 * c[n : 2 * n] + c[2 * n :])))


def _checkerboard_gini(grid: BivariateSIGrid) -> float:
    return float(
        4.0 * (_section_integral(grid, anti=False) + _section_integral(grid, anti=True)) - 2.0
    )


_REARRANGED = {
    "spearman_rho": _checkerboard_spearman,
    "kendall_tau": _checkerboard_kendall,
    "gini_gamma": _checkerboard_gini,
}


def rearranged_measure(model: ConditionalModel, kind: str) -> float:
    """Concordance measure of the reduced SI grid, as a dependence measure.

    The model is reduced to its bivariate SI grid and the grid is read as a
    checkerboard copula (mass uniform within each cell); the chosen measure is
    then evaluated in closed form.  Requires a uniform-like Y marginal whose
    atoms stand for an equal-probability grid; other marginals raise.

    On SI grids the value is nonnegative, 0 exactly at independence, and
    approaches 1 under grid refinement of perfectly dependent models (a
    finite m x m comonotone checkerboard scores 1 - 1/m^2 for Spearman and
    1 - 1/m for Kendall: the within-cell uniform mass is genuine noise of the
    checkerboard law).
    """
    _require_nondegenerate(model, "rearranged measure")
    _require_uniform_y(model)
    try:
        fn = _REARRANGED[kind]
    except KeyError:
        raise DomainError(f"unknown measure kind {kind!r}; choose from {sorted(_REARRANGED)}") from None
    return fn(reduce_to_si(model))
