"""Decreasing rearrangements of step functions and the Schur order.

The Schur order compares the variability of two integrable functions with
equal total integrals: f precedes g when the running integral of the
decreasing rearrangement of f stays below that of g everywhere.  By the
Hardy-Littlewood-Polya theorem this is exactly the convex order of the value
laws, which makes this module the computational heart of the conditional
convex order engine.

Everything operates on :class:`~depord.dist_core.StepFunction` values, which
is fully general here: conditional distribution rows reach this module only
after predictor cells have been flattened to a weighted partition of (0,1).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .dist_core import ATOL, DomainError, StepFunction

DEFAULT_TOL = 1e-9


class Verdict(enum.Enum):
    """Outcome of an order comparison."""

    LESS_EQ = "LessEq"
    GREATER_EQ = "GreaterEq"
    EQUAL = "Equal"
    INCOMPARABLE = "Incomparable"
    MARGINAL_MISMATCH = "MarginalMismatch"

    def __str__(self) -> str:  # JSON-friendly spelling
        return self.value

    def flipped(self) -> "Verdict":
        if self is Verdict.LESS_EQ:
            return Verdict.GREATER_EQ
        if self is Verdict.GREATER_EQ:
            return Verdict.LESS_EQ
        return self


@dataclass(frozen=True)
class SchurExcess:
    """Where one integrated rearrangement exceeds the other the most.

    ``high``/``low`` are the two integrated values at ``x``; ``gap`` is their
    nonnegative difference (0 when the side never exceeds).
    """

    x: float
    high: float
    low: float

    @property
    def gap(self) -> float:
        return max(self.high - self.low, 0.0)


@dataclass(frozen=True)
class SchurResult:
    """Verdict of a Schur comparison plus maximal-violation witnesses per side.

    ``f_excess`` locates the largest exceedance of f's integrated rearrangement
    over g's, ``g_excess`` the reverse; a crossing shows up as both gaps above
    tolerance, which lets callers print a crossing diagnostic.
    """

    verdict: Verdict
    f_excess: SchurExcess
    g_excess: SchurExcess
    tol: float

    @property
    def max_violation(self) -> float:
        return max(self.f_excess.gap, self.g_excess.gap)


def decreasing_rearrangement(f: StepFunction) -> StepFunction:
    """The decreasing rearrangement f* of a step function.

    Implemented as a weight-stable sort of (value, width) pairs descending by
    value, ties broken by original cell index.  For every threshold w the total
    length of {f* >= w} equals the total length of {f >= w}; the rearrangement
    is unique up to null sets, and the stable tie-break fixes one version.
    """
    order = np.argsort(-f.values, kind="stable")
    widths = f.widths[order]
    bp = np.concatenate(([0.0], np.cumsum(widths)))
    bp[-1] = 1.0
    return StepFunction(bp, f.values[order])


def _integrated_at_breaks(g: StepFunction) -> np.ndarray:
    """Running integral of g evaluated at its own breakpoints."""
    return np.concatenate(([0.0], np.cumsum(g.widths * g.values)))


def integrated_rearrangement(f: StepFunction, x) -> np.ndarray | float:
    """Exact evaluation of x -> integral of f* over (0, x).

    Piecewise linear and concave in x because f* is decreasing.  Accepts a
    scalar or an array of points in [0, 1].
    """
    xs = np.asarray(x, dtype=float)
    if np.any(xs < -ATOL) or np.any(xs > 1.0 + ATOL):
        raise DomainError("evaluation points must lie in [0,1]")
    xs = np.clip(xs, 0.0, 1.0)
    g = decreasing_rearrangement(f)
    cum = _integrated_at_breaks(g)
    idx = np.clip(np.searchsorted(g.breakpoints, xs, side="right") - 1, 0, g.values.size - 1)
    out = cum[idx] + (xs - g.breakpoints[idx]) * g.values[idx]
    return float(out) if np.isscalar(x) else out


def schur_leq(f: StepFunction, g: StepFunction, tol: float = DEFAULT_TOL) -> SchurResult:
    """Compare f and g in the Schur order.

    Returns MarginalMismatch when the total integrals differ by more than tol.
    Otherwise the two integrated rearrangements are compared at the union of
    their breakpoints, which suffices: both are piecewise linear, so the
    extrema of their difference occur at breakpoints.  LessEq means f is the
    less variable function (f precedes g).
    """
    int_f, int_g = f.integral(), g.integral()
    if abs(int_f - int_g) > tol:
        zero = SchurExcess(0.0, 0.0, 0.0)
        return SchurResult(Verdict.MARGINAL_MISMATCH, zero, zero, tol)
    fr = decreasing_rearrangement(f)
    gr = decreasing_rearrangement(g)
    xs = np.unique(np.concatenate((fr.breakpoints, gr.breakpoints)))
    if_x = np.interp(xs, fr.breakpoints, _integrated_at_breaks(fr))
    ig_x = np.interp(xs, gr.breakpoints, _integrated_at_breaks(gr))
    diff = if_x - ig_x
    i_hi = int(np.argmax(diff))
    i_lo = int(np.argmin(diff))
    f_excess = SchurExcess(float(xs[i_hi]), float(if_x[i_hi]), float(ig_x[i_hi]))
    g_excess = SchurExcess(float(xs[i_lo]), float(ig_x[i_lo]), float(if_x[i_lo]))
    f_exceeds = f_excess.gap > tol
    g_exceeds = g_excess.gap > tol
    if f_exceeds and g_exceeds:
        verdict = Verdict.INCOMPARABLE
    elif f_exceeds:
        verdict = Verdict.GREATER_EQ
    elif g_exceeds:
        verdict = Verdict.LESS_EQ
    else:
        verdict = Verdict.EQUAL
    return SchurResult(verdict, f_excess, g_excess, tol)
