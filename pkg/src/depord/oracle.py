"""Independent brute-force verifiers for the comparison engines and measures.

The implementations here deliberately favor auditability over speed: the
convex order is decided by stop-loss sums, the conditional convex order by
comparing conditional probability laws level by level against that test, and
Chatterjee's xi by the product-measure double sum.  They serve as the second
route in every dual-route check of the test suite and are shipped with the
library so users can run the same verification.  Single-threaded by design.
"""

from __future__ import annotations

import numpy as np

from .ccx import ComparisonResult, _aggregate
from .dist_core import ConditionalModel, DegenerateError, DiscreteMarginal, marginal_constraint
from .rearrange import DEFAULT_TOL, SchurExcess, SchurResult, Verdict


def law_of(values, weights) -> DiscreteMarginal:
    """Discrete law of a weighted list of values: collapse, sort, normalize."""
    v = np.asarray(values, dtype=float)
    w = np.asarray(weights, dtype=float)
    atoms, inverse = np.unique(v, return_inverse=True)
    probs = np.zeros(atoms.size)
    np.add.at(probs, inverse, w)
    keep = probs > 0
    return DiscreteMarginal(atoms[keep], probs[keep] / probs.sum())


def _stop_loss(m: DiscreteMarginal, t: np.ndarray) -> np.ndarray:
    """E (S - t)_+ for each threshold t."""
    return np.maximum(m.atoms[None, :] - t[:, None], 0.0) @ m.probs


def convex_order_bruteforce(s: DiscreteMarginal, t: DiscreteMarginal, tol: float = 1e-12) -> bool:
    """Decide s <=_cx t for discrete laws on [0, 1] by stop-loss comparison.

    True iff the means agree (within 1e-12) and E(S - c)_+ <= E(T - c)_+ at
    every c in the union of the atom sets, a finite sufficient family for
    discrete laws.
    """
    if abs(s.mean - t.mean) > 1e-12:
        return False
    thresholds = np.union1d(s.atoms, t.atoms)
    return bool(np.all(_stop_loss(s, thresholds) <= _stop_loss(t, thresholds) + tol))


def ccx_bruteforce(a: ConditionalModel, b: ConditionalModel, tol: float = DEFAULT_TOL) -> ComparisonResult:
    """Conditional convex order by definition: per level, compare the laws of
    the conditional survival probabilities in convex order, both directions.

    At each interior range-closure level the survival values 1 - F[j-1, i]
    weighted by the cell law form a [0,1]-valued discrete law on each side;
    the per-level verdicts aggregate exactly as in the main engine.  Must
    agree with ccx_compare and ccx_via_concordance on every input.
    """
    if not marginal_constraint(a.y_marginal, b.y_marginal):
        return ComparisonResult(Verdict.MARGINAL_MISMATCH, None, tol)
    m = a.n_atoms
    levels = a.y_marginal.cdf_values[:-1]
    results = []
    for j in range(m - 1):
        law_a = law_of(1.0 - a.cond_cdf[j], a.cell_weights)
        law_b = law_of(1.0 - b.cond_cdf[j], b.cell_weights)
        thresholds = np.union1d(law_a.atoms, law_b.atoms)
        sl_a = _stop_loss(law_a, thresholds)
        sl_b = _stop_loss(law_b, thresholds)
        diff = sl_a - sl_b
        i_hi, i_lo = int(np.argmax(diff)), int(np.argmin(diff))
        # excess witnesses carry the violating stop-loss threshold in x
        a_exc = SchurExcess(float(thresholds[i_hi]), float(sl_a[i_hi]), float(sl_b[i_hi]))
        b_exc = SchurExcess(float(thresholds[i_lo]), float(sl_b[i_lo]), float(sl_a[i_lo]))
        leq = a_exc.gap <= tol
        geq = b_exc.gap <= tol
        if leq and geq:
            verdict = Verdict.EQUAL
        elif leq:
            verdict = Verdict.LESS_EQ
        elif geq:
            verdict = Verdict.GREATER_EQ
        else:
            verdict = Verdict.INCOMPARABLE
        results.append(SchurResult(verdict, a_exc, b_exc, tol))
    return _aggregate(levels, results, tol)


def xi_bruteforce(model: ConditionalModel) -> float:
    """Chatterjee's xi through the product-measure representation.

    Evaluates alpha * sum_{i,j} w_i p_j F[j,i]^2 - beta with the constants
    alpha and beta computed from the Y marginal alone; must match
    chatterjee_xi to 1e-10.
    """
    if model.n_atoms < 2:
        raise DegenerateError("xi undefined for degenerate Y")
    p = model.y_marginal.probs
    Fy = model.y_marginal.cdf_values
    denom = float(p @ (Fy * (1.0 - Fy)))
    if denom <= 1e-12:
        raise DegenerateError("xi undefined for degenerate Y")
    alpha = 1.0 / denom
    beta = alpha * float(p @ (Fy * Fy))
    second_moment = float(p @ (model.cond_cdf**2 @ model.cell_weights))
    return alpha * second_moment - beta
