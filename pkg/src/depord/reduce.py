"""Dimension reduction to bivariate stochastically increasing (SI) grids.

Any finite model of (Y, X) can be transformed, by decreasingly rearranging
each conditional cdf row over the predictor cells, into a bivariate model on
(0,1) x {Y atoms} whose conditional laws increase stochastically in the
uniform coordinate u.  The reduced grid has the same Y marginal and the same
strength of functional dependence in the conditional convex order, which
turns the order into a plain lower-orthant (concordance) comparison of joint
cdfs: that is the second, independent comparison engine provided here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ccx import ComparisonResult, Witness, ccx_compare
from .dist_core import (
    ATOL,
    ConditionalModel,
    DiscreteMarginal,
    DomainError,
    _as_float_array,
    _readonly,
    marginal_constraint,
)
from .rearrange import DEFAULT_TOL, Verdict

# Breakpoints closer than this are merged when forming the common u-partition.
_BREAK_MERGE_TOL = 1e-12


@dataclass(frozen=True)
class BivariateSIGrid:
    """The dimension-reduced SI distribution of a model.

    ``G[j, k]`` is the conditional cdf of Y at atom a_j given u in the k-th
    interval of ``u_breaks``.  Rows are nondecreasing in j with last row 1;
    columns are nonincreasing in k (the SI property); the width-weighted row
    mixture reproduces the Y marginal cdf.
    """

    u_breaks: np.ndarray
    y_marginal: DiscreteMarginal
    G: np.ndarray

    def __post_init__(self):
        u = _as_float_array(self.u_breaks, "u_breaks")
        G = _as_float_array(self.G, "G")
        if u.ndim != 1 or u.size < 2 or abs(u[0]) > ATOL or abs(u[-1] - 1.0) > ATOL:
            raise DomainError("u_breaks must run from 0 to 1")
        if not np.all(np.diff(u) > 0):
            raise DomainError("u_breaks must be strictly increasing")
        if G.shape != (self.y_marginal.n_atoms, u.size - 1):
            raise DomainError("G must have shape (n_atoms, n_intervals)")
        u = u.copy()
        u[0], u[-1] = 0.0, 1.0
        object.__setattr__(self, "u_breaks", _readonly(u))
        object.__setattr__(self, "G", _readonly(G))

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.u_breaks)

    @property
    def y_atoms(self) -> np.ndarray:
        return self.y_marginal.atoms


def reduce_to_si(model: ConditionalModel) -> BivariateSIGrid:
    """Rearranged quantile transform of a model: its bivariate SI grid.

    Each Y-row of the conditional cdf matrix is independently decreasingly
    rearranged over the cells (weighted by the cell law), and all rows are
    expressed on the union of the per-row breakpoints, so no interpolation is
    introduced.  Column monotonicity in the atom index holds automatically
    because pointwise dominance of rows survives rearrangement.
    """
    w = model.cell_weights
    F = model.cond_cdf
    m, _ = F.shape
    orders = np.argsort(-F, axis=1, kind="stable")
    cum_rows = np.cumsum(np.take(w, orders), axis=1)
    breaks = np.unique(cum_rows.ravel())
    breaks = breaks[(breaks > _BREAK_MERGE_TOL) & (breaks < 1.0 - _BREAK_MERGE_TOL)]
    if breaks.size:
        keep = np.concatenate(([True], np.diff(breaks) > _BREAK_MERGE_TOL))
        breaks = breaks[keep]
    u_breaks = np.concatenate(([0.0], breaks, [1.0]))
    mids = 0.5 * (u_breaks[:-1] + u_breaks[1:])
    G = np.empty((m, mids.size))
    for j in range(m):
        vals = F[j, orders[j]]
        idx = np.searchsorted(cum_rows[j], mids, side="left")
        G[j] = vals[np.minimum(idx, vals.size - 1)]
    G[-1] = 1.0
    return BivariateSIGrid(u_breaks, model.y_marginal, G)


def si_mass_matrix(grid: BivariateSIGrid) -> np.ndarray:
    """Joint probabilities of the SI grid: P(Y = a_j, u in interval k)."""
    pmf = np.diff(grid.G, axis=0, prepend=0.0)
    return pmf * grid.widths


def grid_to_model(grid: BivariateSIGrid) -> ConditionalModel:
    """Interpret the u-intervals of a grid as predictor cells."""
    return ConditionalModel(grid.y_marginal, grid.widths, grid.G)


def verify_si(grid: BivariateSIGrid, tol: float = DEFAULT_TOL) -> bool:
    """Check the three grid invariants within tol.

    (i) every row is nonincreasing in u, (ii) columns are nondecreasing in the
    atom index with last row 1, (iii) the width-weighted mixture of each row
    equals the Y marginal cdf at its atom.
    """
    G = grid.G
    if G.shape[1] > 1 and np.max(np.diff(G, axis=1)) > tol:
        return False
    if G.shape[0] > 1 and np.min(np.diff(G, axis=0)) < -tol:
        return False
    if np.max(np.abs(G[-1] - 1.0)) > tol:
        return False
    mix = G @ grid.widths
    return bool(np.max(np.abs(mix - grid.y_marginal.cdf_values)) <= tol)


def _joint_cdf_at(grid: BivariateSIGrid, us: np.ndarray) -> np.ndarray:
    """H[j, t] = P(Y <= a_j, U <= us[t]) for the grid, exact piecewise-linear."""
    cum = np.concatenate(
        (np.zeros((grid.G.shape[0], 1)), np.cumsum(grid.G * grid.widths, axis=1)), axis=1
    )
    idx = np.clip(np.searchsorted(grid.u_breaks, us, side="right") - 1, 0, grid.widths.size - 1)
    return cum[:, idx] + (us - grid.u_breaks[idx]) * grid.G[:, idx]


def concordance_leq(ga: BivariateSIGrid, gb: BivariateSIGrid, tol: float = DEFAULT_TOL) -> ComparisonResult:
    """Compare two SI grids in the concordance order.

    Requires the marginal constraint on the Y sides; the u-marginal is uniform
    for both by construction, so under equal marginals the lower-orthant
    comparison of joint cdfs suffices.  Evaluation happens at the union of the
    two u-break sets crossed with the matched Y levels, which is exact because
    the joint cdfs are piecewise linear in u at each level.
    """
    if not marginal_constraint(ga.y_marginal, gb.y_marginal):
        return ComparisonResult(Verdict.MARGINAL_MISMATCH, None, tol)
    us = np.unique(np.concatenate((ga.u_breaks, gb.u_breaks)))
    ha = _joint_cdf_at(ga, us)[:-1]  # top atom row is u itself on both sides
    hb = _joint_cdf_at(gb, us)[:-1]
    levels = ga.y_marginal.cdf_values[:-1]
    if ha.size == 0:
        return ComparisonResult(Verdict.EQUAL, None, tol)
    diff = ha - hb
    i_hi = np.unravel_index(int(np.argmax(diff)), diff.shape)
    i_lo = np.unravel_index(int(np.argmin(diff)), diff.shape)
    a_exceeds = diff[i_hi] > tol
    b_exceeds = -diff[i_lo] > tol
    # A <=_c B requires H_A <= H_B everywhere: on SI grids the pointwise
    # larger joint cdf is the more positively dependent (ccx-larger) side.
    if a_exceeds and b_exceeds:
        j, t = i_hi if diff[i_hi] >= -diff[i_lo] else i_lo
        hi, lo = (ha, hb) if diff[i_hi] >= -diff[i_lo] else (hb, ha)
        witness = Witness(float(levels[j]), float(us[t]), float(hi[j, t]), float(lo[j, t]))
        verdict = Verdict.INCOMPARABLE
    elif a_exceeds:
        verdict, witness = Verdict.GREATER_EQ, None
    elif b_exceeds:
        verdict, witness = Verdict.LESS_EQ, None
    else:
        verdict, witness = Verdict.EQUAL, None
    return ComparisonResult(verdict, witness, tol)


def _rescale_to_cdf(grid: BivariateSIGrid) -> BivariateSIGrid:
    """Replace the Y atoms by their cdf values (right-continuous at atoms)."""
    marg = DiscreteMarginal(grid.y_marginal.cdf_values, grid.y_marginal.probs)
    return BivariateSIGrid(grid.u_breaks, marg, grid.G)


def ccx_via_concordance(a: ConditionalModel, b: ConditionalModel, tol: float = DEFAULT_TOL) -> ComparisonResult:
    """Second ccx engine: reduce both models and compare in concordance order.

    Both models are reduced to their SI grids, the Y scale is mapped to cdf
    values (under the marginal constraint both sides land on the same level
    set), and the grids are compared in the lower-orthant order.  On SI grids
    the conditional cdf rows are already decreasing, so this evaluates the
    same integrated rearrangements as the Schur engine; the two engines must
    agree on every input.  Note the orientation flip: being smaller in ccx
    means having the pointwise *larger* reduced joint cdf.
    """
    if not marginal_constraint(a.y_marginal, b.y_marginal):
        return ComparisonResult(Verdict.MARGINAL_MISMATCH, None, tol)
    ga = _rescale_to_cdf(reduce_to_si(a))
    gb = _rescale_to_cdf(reduce_to_si(b))
    return concordance_leq(ga, gb, tol)


def self_equivalence(model: ConditionalModel, tol: float = DEFAULT_TOL) -> ComparisonResult:
    """Compare a model with the model of its own reduction (expected Equal)."""
    return ccx_compare(model, grid_to_model(reduce_to_si(model)), tol)
