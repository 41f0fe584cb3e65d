"""Univariate discrete marginals, generalized inverses, and the finite joint model.

Every joint law of a response Y and a predictor vector X enters the library in
one universal finite form: a :class:`ConditionalModel`, which stores the
marginal law of Y, the weights of a finite cell partition of the predictor
space, and the matrix of conditional cdf values of Y given each cell.  All
comparison engines and dependence measures operate on this representation.

All types are immutable after construction and all operations are pure
functions, so everything here is safe for unrestricted concurrent use.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

# Global float-comparison policy: relative 1e-9 with absolute floor 1e-12,
# unless an operation documents a different tolerance.
ATOL = 1e-12
RTOL = 1e-9

# Degree of marginal consistency enforced on every ConditionalModel.
MARGINAL_CONSISTENCY_TOL = 1e-10

# Responses with more distinct values than this are quantile-binned on ingest.
DEFAULT_MAX_Y_ATOMS = 200


class DepordError(Exception):
    """Base class for all library errors."""


class DomainError(DepordError, ValueError):
    """An input violates the contract of an operation (domain/shape/schema)."""


class DegenerateError(DepordError, ValueError):
    """A quantity is undefined because the input is numerically degenerate."""


def _as_float_array(x, name: str) -> np.ndarray:
    a = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(a)):
        raise DomainError(f"{name} must be finite, got {a!r}")
    return a


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class DiscreteMarginal:
    """A univariate discrete law: strictly increasing atoms with positive masses.

    The probabilities are renormalized on construction so that the cdf reaches
    exactly 1 at the largest atom.
    """

    atoms: np.ndarray
    probs: np.ndarray
    cdf_values: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        atoms = _as_float_array(self.atoms, "atoms")
        probs = _as_float_array(self.probs, "probs")
        if atoms.ndim != 1 or probs.ndim != 1 or atoms.size != probs.size:
            raise DomainError("atoms and probs must be 1-d arrays of equal length")
        if atoms.size == 0:
            raise DomainError("a marginal needs at least one atom")
        if not np.all(np.diff(atoms) > 0):
            raise DomainError("atoms must be strictly increasing")
        if np.any(probs <= 0):
            raise DomainError("probs must be strictly positive")
        total = probs.sum()
        if abs(total - 1.0) > 1e-9:
            raise DomainError(f"probs must sum to 1 within 1e-9, got {total!r}")
        probs = probs / total
        cdf = np.cumsum(probs)
        cdf[-1] = 1.0
        object.__setattr__(self, "atoms", _readonly(atoms))
        object.__setattr__(self, "probs", _readonly(probs))
        object.__setattr__(self, "cdf_values", _readonly(cdf))

    @property
    def n_atoms(self) -> int:
        return self.atoms.size

    @property
    def mean(self) -> float:
        return float(self.atoms @ self.probs)

    def cdf(self, y) -> np.ndarray | float:
        """Right-continuous cdf evaluated at y (scalar or array)."""
        idx = np.searchsorted(self.atoms, y, side="right")
        padded = np.concatenate(([0.0], self.cdf_values))
        out = padded[idx]
        return float(out) if np.isscalar(y) else out


def quantile(m: DiscreteMarginal, v: float) -> float:
    """Generalized inverse min{a_j : cdf(a_j) >= v}; left-continuous in v.

    Raises DomainError unless 0 < v < 1.
    """
    if not (0.0 < v < 1.0):
        raise DomainError(f"quantile level must lie in (0,1), got {v!r}")
    j = int(np.searchsorted(m.cdf_values, v, side="left"))
    return float(m.atoms[j])


def range_closure(m: DiscreteMarginal) -> np.ndarray:
    """Closure of the range of the cdf: {0} together with all cdf values."""
    return np.concatenate(([0.0], m.cdf_values))


def marginal_constraint(m1: DiscreteMarginal, m2: DiscreteMarginal) -> bool:
    """True iff the two cdf ranges have the same closure (within 1e-12).

    This is the comparability precondition of the conditional convex order:
    only laws whose cdfs attain the same set of values can be ranked.
    """
    r1, r2 = range_closure(m1), range_closure(m2)
    return r1.size == r2.size and bool(np.all(np.abs(r1 - r2) <= ATOL))


@dataclass(frozen=True)
class StepFunction:
    """Right-open step function on (0,1]: value ``values[k]`` on (t_{k-1}, t_k]."""

    breakpoints: np.ndarray  # 0 = t_0 < t_1 < ... < t_K = 1
    values: np.ndarray

    def __post_init__(self):
        bp = _as_float_array(self.breakpoints, "breakpoints")
        va = _as_float_array(self.values, "values")
        if bp.ndim != 1 or va.ndim != 1 or bp.size != va.size + 1:
            raise DomainError("need K+1 breakpoints for K values")
        if abs(bp[0]) > ATOL or abs(bp[-1] - 1.0) > ATOL:
            raise DomainError("breakpoints must start at 0 and end at 1")
        if not np.all(np.diff(bp) > 0):
            raise DomainError("breakpoints must be strictly increasing")
        bp = bp.copy()
        bp[0], bp[-1] = 0.0, 1.0
        object.__setattr__(self, "breakpoints", _readonly(bp))
        object.__setattr__(self, "values", _readonly(va))

    @classmethod
    def from_weights(cls, values, weights) -> "StepFunction":
        """Step function taking values[k] on a cell of length weights[k]."""
        w = _as_float_array(weights, "weights")
        if np.any(w <= 0):
            raise DomainError("weights must be strictly positive")
        bp = np.concatenate(([0.0], np.cumsum(w / w.sum())))
        bp[-1] = 1.0
        return cls(bp, np.asarray(values, dtype=float))

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.breakpoints)

    def integral(self) -> float:
        return float(self.widths @ self.values)


@dataclass(frozen=True)
class ConditionalModel:
    """Finite representation of a dependence model (Y, X).

    Attributes
    ----------
    y_marginal:
        The law of Y.
    cell_weights:
        Probabilities of the predictor cells (the pushforward of X through its
        cell partition); strictly positive, normalized to sum 1.
    cond_cdf:
        Matrix F with F[j, i] = P(Y <= a_j | cell i), rows indexed by the Y
        atoms in increasing order.  Columns are nondecreasing in j with last
        row identically 1, and the weighted column mixture reproduces the Y
        marginal cdf at every atom (tolerance 1e-10).
    """

    y_marginal: DiscreteMarginal
    cell_weights: np.ndarray
    cond_cdf: np.ndarray

    def __post_init__(self):
        w = _as_float_array(self.cell_weights, "cell_weights")
        F = _as_float_array(self.cond_cdf, "cond_cdf")
        if w.ndim != 1 or np.any(w <= 0):
            raise DomainError("cell_weights must be 1-d and strictly positive")
        total = w.sum()
        if abs(total - 1.0) > 1e-9:
            raise DomainError("cell_weights must sum to 1 within 1e-9")
        w = w / total
        m = self.y_marginal.n_atoms
        if F.shape != (m, w.size):
            raise DomainError(
                f"cond_cdf must have shape (n_atoms, n_cells) = {(m, w.size)}, got {F.shape}"
            )
        if F.min() < -1e-9 or F.max() > 1.0 + 1e-9:
            raise DomainError("cond_cdf entries must lie in [0,1]")
        F = np.clip(F, 0.0, 1.0)
        if m > 1 and np.min(np.diff(F, axis=0)) < -1e-9:
            raise DomainError("cond_cdf columns must be nondecreasing in the atom index")
        if np.max(np.abs(F[-1] - 1.0)) > 1e-9:
            raise DomainError("last cond_cdf row must equal 1")
        F = F.copy()
        F[-1] = 1.0
        mix = F @ w
        err = np.max(np.abs(mix - self.y_marginal.cdf_values))
        if err > MARGINAL_CONSISTENCY_TOL:
            raise DomainError(
                f"cell mixture disagrees with the Y marginal cdf by {err:.3e} "
                f"(tolerance {MARGINAL_CONSISTENCY_TOL})"
            )
        object.__setattr__(self, "cell_weights", _readonly(w))
        object.__setattr__(self, "cond_cdf", _readonly(F))

    @property
    def n_cells(self) -> int:
        return self.cell_weights.size

    @property
    def n_atoms(self) -> int:
        return self.y_marginal.n_atoms

    def level_values(self) -> np.ndarray:
        """Interior range-closure values v_1 < ... < v_{m-1} (one per non-top atom)."""
        return self.y_marginal.cdf_values[:-1]

    def joint_mass(self) -> np.ndarray:
        """Joint probabilities P(Y = a_j, cell i), rows in increasing atom order."""
        pmf = np.diff(self.cond_cdf, axis=0, prepend=0.0)
        return pmf * self.cell_weights


def model_from_joint_mass(mass, y_atoms=None) -> ConditionalModel:
    """Build a ConditionalModel from a joint mass matrix.

    ``mass[j, i]`` is the probability of (Y = a_j, cell i) with rows in
    increasing atom order; the matrix is normalized to total mass 1.  Rows or
    columns with zero mass are rejected.  Marginal consistency holds by
    construction.
    """
    M = _as_float_array(mass, "mass")
    if M.ndim != 2:
        raise DomainError("mass must be a 2-d matrix")
    if np.any(M < 0):
        raise DomainError("mass entries must be nonnegative")
    total = M.sum()
    if total <= 0:
        raise DomainError("mass must have positive total")
    M = M / total
    row = M.sum(axis=1)
    col = M.sum(axis=0)
    if np.any(row <= 0) or np.any(col <= 0):
        raise DomainError("every atom row and cell column needs positive mass")
    if y_atoms is None:
        y_atoms = np.arange(1.0, M.shape[0] + 1.0)
    marg = DiscreteMarginal(y_atoms, row)
    F = np.cumsum(M, axis=0) / col
    F[-1] = 1.0
    return ConditionalModel(marg, col, F)


def independent_model(y_marginal: DiscreteMarginal, cell_weights) -> ConditionalModel:
    """The product model: every cell carries the unconditional cdf of Y."""
    w = _as_float_array(cell_weights, "cell_weights")
    F = np.repeat(y_marginal.cdf_values[:, None], w.size, axis=1)
    return ConditionalModel(y_marginal, w, F)


def perfect_model(y_marginal: DiscreteMarginal) -> ConditionalModel:
    """The comonotone functional model: cell j carries Y = a_j with certainty."""
    m = y_marginal.n_atoms
    F = (np.arange(m)[:, None] >= np.arange(m)[None, :]).astype(float)
    return ConditionalModel(y_marginal, y_marginal.probs, F)


def _rank_bins(x: np.ndarray, n_bins: int) -> np.ndarray:
    """Bin indices 0..n_bins-1 of near-equal counts from the ranks of x."""
    n = x.size
    order = np.argsort(x, kind="stable")
    ranks = np.empty(n, dtype=np.int64)
    ranks[order] = np.arange(n)
    return (ranks * n_bins) // n


def _iterated_cells(x: np.ndarray, n_cells: int) -> np.ndarray:
    """Lexicographic coordinatewise rank binning of a predictor matrix.

    The requested cell count is factored across the coordinates as evenly as
    possible; each coordinate is rank-binned within the groups formed by the
    previous coordinates, matching the iterated structure of the multivariate
    quantile transform.
    """
    n, p = x.shape
    remaining = n_cells
    labels = np.zeros(n, dtype=np.int64)
    for d in range(p):
        b = max(1, round(remaining ** (1.0 / (p - d))))
        if d == p - 1:
            b = max(1, remaining)
        remaining = max(1, -(-remaining // b))  # ceil division
        sub = np.zeros(n, dtype=np.int64)
        for g in np.unique(labels):
            mask = labels == g
            sub[mask] = _rank_bins(x[mask, d], min(b, int(mask.sum())))
        labels = labels * b + sub
    # compact labels to 0..k-1 preserving lexicographic order
    _, labels = np.unique(labels, return_inverse=True)
    return labels


def from_samples(y, x, n_cells: int, max_y_atoms: int = DEFAULT_MAX_Y_ATOMS) -> ConditionalModel:
    """Empirical checkerboard estimator of the model of (Y, X) from samples.

    Parameters
    ----------
    y : (N,) response values.
    x : (N,) or (N, p) predictor values.
    n_cells : number of predictor cells formed by iterated rank binning.
    max_y_atoms : responses with more distinct values are quantile-binned.
    """
    y = _as_float_array(y, "y")
    x = _as_float_array(x, "x")
    if y.ndim != 1:
        raise DomainError("y must be one-dimensional")
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2 or x.shape[0] != y.size:
        raise DomainError("x must be (N,) or (N, p) aligned with y")
    n = y.size
    if n == 0:
        raise DomainError("empty sample")
    if n_cells < 1 or n < n_cells:
        raise DomainError(f"need at least n_cells={n_cells} rows, got {n}")

    uniq = np.unique(y)
    if uniq.size > max_y_atoms:
        edges = np.quantile(y, np.arange(1, max_y_atoms) / max_y_atoms)
        bin_idx = np.searchsorted(edges, y, side="left")
        keep = np.unique(bin_idx)
        remap = np.zeros(keep.max() + 1, dtype=np.int64)
        remap[keep] = np.arange(keep.size)
        y_idx = remap[bin_idx]
        atoms = np.array([y[y_idx == j].mean() for j in range(keep.size)])
        if not np.all(np.diff(atoms) > 0):  # guard against ties in bin means
            atoms = np.unique(atoms)
            y_idx = np.searchsorted(atoms, np.array([atoms[i] for i in y_idx]))
    else:
        atoms = uniq
        y_idx = np.searchsorted(uniq, y)

    cells = _iterated_cells(x, n_cells)
    k = cells.max() + 1
    counts = np.zeros((atoms.size, k))
    np.add.at(counts, (y_idx, cells), 1.0)
    return model_from_joint_mass(counts, y_atoms=atoms)


def read_csv_model(path, n_cells: int, max_y_atoms: int = DEFAULT_MAX_Y_ATOMS) -> ConditionalModel:
    """Ingest a CSV file (header row; first column y, remaining columns x1..xp).

    Decimal-point numbers, UTF-8.  Missing or non-numeric values are rejected.
    """
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DomainError(f"{path}: empty file") from None
        if len(header) < 2:
            raise DomainError(f"{path}: need a y column and at least one x column")
        width = len(header)
        for lineno, rec in enumerate(reader, start=2):
            if len(rec) != width:
                raise DomainError(f"{path}:{lineno}: expected {width} fields, got {len(rec)}")
            try:
                vals = [float(c) for c in rec]
            except ValueError:
                raise DomainError(f"{path}:{lineno}: non-numeric or missing value") from None
            if not all(np.isfinite(vals)):
                raise DomainError(f"{path}:{lineno}: non-finite value")
            rows.append(vals)
    if not rows:
        raise DomainError(f"{path}: no data rows")
    data = np.asarray(rows, dtype=float)
    return from_samples(data[:, 0], data[:, 1:], n_cells, max_y_atoms=max_y_atoms)
