"""The conditional convex order engine and axiom-level predicates.

Two finite models are compared by ranking, at every interior range-closure
level v of the shared Y marginal, the conditional cdf row across cells in the
Schur order.  A model precedes another exactly when every level does; a mix of
directions across levels is reported as Incomparable together with the level
and location of the worst violation.

Minimal elements are the independent models, maximal elements the perfectly
dependent ones, and merging predictor cells can only move a model down in the
order (data processing).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dist_core import ATOL, ConditionalModel, DomainError, StepFunction, marginal_constraint
from .rearrange import DEFAULT_TOL, SchurResult, Verdict, schur_leq

__all__ = [
    "Verdict",
    "Witness",
    "LevelDetail",
    "ComparisonResult",
    "ccx_compare",
    "is_independent",
    "is_perfect",
    "marginalize_cells",
]


@dataclass(frozen=True)
class Witness:
    """Location of the largest violated inequality: at Y-level ``v`` and
    u-coordinate ``x`` the losing side has integrated rearrangement ``lhs``
    exceeding the other side's ``rhs``."""

    v: float
    x: float
    lhs: float
    rhs: float

    @property
    def margin(self) -> float:
        return self.lhs - self.rhs


@dataclass(frozen=True)
class LevelDetail:
    """Per-level outcome kept for diagnostics and CLI reports."""

    v: float
    verdict: Verdict
    max_violation: float


@dataclass(frozen=True)
class ComparisonResult:
    verdict: Verdict
    witness: Witness | None
    tol: float
    per_level: tuple[LevelDetail, ...] = ()
    note: str | None = None


def _eta_rows(model: ConditionalModel):
    """Step functions u -> P(Y <= a_j | cell at u), one per interior level."""
    rows = []
    for j in range(model.n_atoms - 1):
        rows.append(StepFunction.from_weights(model.cond_cdf[j], model.cell_weights))
    return rows


def _aggregate(levels, results: list[SchurResult], tol: float) -> ComparisonResult:
    details = []
    can_leq = True
    can_geq = True
    worst: Witness | None = None
    for v, res in zip(levels, results):
        details.append(LevelDetail(float(v), res.verdict, res.max_violation))
        if res.verdict is Verdict.GREATER_EQ:
            can_leq = False
        elif res.verdict is Verdict.LESS_EQ:
            can_geq = False
        elif res.verdict is Verdict.INCOMPARABLE:
            can_leq = False
            can_geq = False
        for exc in (res.f_excess, res.g_excess):
            if worst is None or exc.gap > worst.margin:
                worst = Witness(float(v), exc.x, exc.high, exc.low)
    if can_leq and can_geq:
        verdict = Verdict.EQUAL
    elif can_leq:
        verdict = Verdict.LESS_EQ
    elif can_geq:
        verdict = Verdict.GREATER_EQ
    else:
        verdict = Verdict.INCOMPARABLE
    witness = worst if verdict is Verdict.INCOMPARABLE else None
    return ComparisonResult(verdict, witness, tol, tuple(details))


def ccx_compare(a: ConditionalModel, b: ConditionalModel, tol: float = DEFAULT_TOL) -> ComparisonResult:
    """Decide the conditional convex order between two models.

    Returns MarginalMismatch unless the Y marginals share their range closure.
    Otherwise every interior closure level matches one cdf row on each side
    (the marginals then necessarily have the same atom count and the same cdf
    values), and the per-level Schur verdicts are aggregated: LessEq iff every
    level is LessEq or Equal, symmetrically for GreaterEq, Equal iff all
    levels are Equal, else Incomparable with the worst level as witness.

    A degenerate Y (single atom) carries no levels and compares Equal.
    """
    if not marginal_constraint(a.y_marginal, b.y_marginal):
        return ComparisonResult(Verdict.MARGINAL_MISMATCH, None, tol)
    rows_a = _eta_rows(a)
    rows_b = _eta_rows(b)
    results = [schur_leq(fa, fb, tol) for fa, fb in zip(rows_a, rows_b)]
    return _aggregate(a.level_values(), results, tol)


def is_independent(model: ConditionalModel, tol: float = DEFAULT_TOL) -> bool:
    """True iff every conditional cdf row is constant across cells within tol."""
    F = model.cond_cdf
    return bool(np.max(F.max(axis=1) - F.min(axis=1)) <= tol)


def is_perfect(model: ConditionalModel, tol: float = DEFAULT_TOL) -> bool:
    """True iff every conditional cdf entry sits within tol of {0, 1}."""
    F = model.cond_cdf
    return bool(np.max(np.minimum(F, 1.0 - F)) <= tol)


def marginalize_cells(model: ConditionalModel, keep_labels) -> ConditionalModel:
    """Integrate out part of the predictor by merging cells with equal label.

    ``keep_labels[i]`` identifies the retained factor value of cell i (for a
    product partition over (X, Z), pass the X index of each cell to obtain the
    model of (Y, X)).  Each merged column is the weight-proportional mixture
    of its members, so the Y marginal is untouched.  By the data processing
    inequality the result never exceeds the input in the conditional convex
    order.
    """
    labels = np.asarray(keep_labels)
    if labels.shape != (model.n_cells,):
        raise DomainError("keep_labels must assign one label per cell")
    uniq, inverse = np.unique(labels, return_inverse=True)
    k = uniq.size
    w = np.zeros(k)
    np.add.at(w, inverse, model.cell_weights)
    F = np.zeros((model.n_atoms, k))
    np.add.at(F.T, inverse, (model.cond_cdf * model.cell_weights).T)
    F = F / w
    return ConditionalModel(model.y_marginal, w, F)
