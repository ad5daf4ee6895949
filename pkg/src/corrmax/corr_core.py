"""Pearson correlations, the largest off-diagonal entry and the test statistic."""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import (
    DegenerateColumn,
    InsufficientColumns,
    InsufficientSamples,
    InvalidP,
    InvalidStatistic,
)
from .extreme_limit import pvalue_with_flag

DEFAULT_BLOCK = 64
# pairs this close to the maximum count as tied; rounding alone can reorder
# exactly equal correlations (e.g. repeated +-1 columns) by a few ulps
TIE_TOL = 1e-12
RATIO_BOUNDS = (0.1, 10.0)
# slack allowed on |rho| <= 1 before a value is treated as invalid
RANGE_SLACK = 1e-12


class RatioWarning(UserWarning):
    """n/p lies outside the range where the asymptotics are expected to apply."""


@dataclass(frozen=True)
class DataMatrix:
    """An ``n x p`` observation matrix (rows are samples, columns variables).

    Values are stored column-major, so ``values.T`` is a C-contiguous
    ``(p, n)`` array with one column per row.
    """

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2:
            raise InsufficientSamples(f"expected a 2-d matrix, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("matrix contains NaN or Inf")
        v = np.asfortranarray(v)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_columns(cls, cols):
        """Build from a ``(p, n)`` array holding one column per row."""
        return cls(np.asarray(cols, dtype=np.float64).T)

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def p(self):
        return self.values.shape[1]


@dataclass(frozen=True)
class StandardizedMatrix:
    n: int
    p: int
    # (p, n) C-contiguous: row j is column j centered to zero mean, unit norm
    cols: np.ndarray
    degenerate_columns: tuple = ()

    @property
    def columns(self):
        """The standardized data as an ``n x p`` view."""
        return self.cols.T

    def drop_degenerate(self):
        """Return ``(matrix without flagged columns, kept original indices)``."""
        keep = [j for j in range(self.p) if j not in set(self.degenerate_columns)]
        cols = np.ascontiguousarray(self.cols[keep])
        return StandardizedMatrix(self.n, len(keep), cols, ()), keep


@dataclass(frozen=True)
class TestReport:
    __test__ = False

    n: int
    p: int
    l_n: float
    arg_pair: tuple
    t_n: float
    p_value: float
    weak_law_stat: float
    pvalue_clamped: bool = False
    ratio_warning: bool = False
    dropped_columns: tuple = field(default_factory=tuple)

    def to_dict(self):
        return {
            "n": self.n,
            "p": self.p,
            "l_n": self.l_n,
            "arg_pair": list(self.arg_pair),
            "t_n": self.t_n,
            "p_value": self.p_value,
            "pvalue_clamped": self.pvalue_clamped,
            "weak_law_stat": self.weak_law_stat,
            "ratio_warning": self.ratio_warning,
            "dropped_columns": list(self.dropped_columns),
        }


def standardize_rows(cols):
    """Center and unit-normalize each row of a ``(p, n)`` array.

    Returns ``(z, degenerate)``. A row counts as degenerate when its centered
    norm is at most ``n * eps * max|x|``, which catches constant columns whose
    mean picked up rounding error. Degenerate rows are left as centered values
    (not rescaled) so callers can never mistake them for unit vectors.
    """
    cols = np.asarray(cols, dtype=np.float64)
    n = cols.shape[1]
    mean = cols.mean(axis=1, keepdims=True)
    z = cols - mean
    norm = np.sqrt(np.einsum("ij,ij->i", z, z))
    scale = np.abs(cols).max(axis=1)
    tiny = n * np.finfo(np.float64).eps * scale
    degenerate = np.flatnonzero(norm <= tiny)
    ok = norm > tiny
    z[ok] /= norm[ok, None]
    return np.ascontiguousarray(z), tuple(int(j) for j in degenerate)


def standardize_columns(m):
    """Center each column to zero mean and scale it to unit Euclidean norm."""
    if m.n < 2:
        raise InsufficientSamples(f"need n >= 2 samples, got {m.n}")
    z, degenerate = standardize_rows(m.values.T)
    return StandardizedMatrix(m.n, m.p, z, degenerate)


def pearson_pair(m, i, j):
    """Pearson correlation between columns ``i`` and ``j`` (0-based)."""
    if i == j:
        raise ValueError("pearson_pair needs two distinct columns")
    if m.n < 2:
        raise InsufficientSamples(f"need n >= 2 samples, got {m.n}")
    z, degenerate = standardize_rows(m.values.T[[i, j]])
    if degenerate:
        raise DegenerateColumn((i, j)[degenerate[0]])
    r = float(np.dot(z[0], z[1]))
    return min(1.0, max(-1.0, r))


def largest_offdiag(z, block=DEFAULT_BLOCK):
    """Return ``(l_n, (i, j))``: the largest |correlation| over pairs i < j.

    Pairs within ``TIE_TOL`` of the maximum are ties and go to the
    lexicographically smallest pair. The result does not depend on ``block``.
    """
    if z.p < 2:
        raise InsufficientColumns(f"need p >= 2 columns, got {z.p}")
    if z.degenerate_columns:
        raise DegenerateColumn(z.degenerate_columns[0])
    v, i, j = kernels.max_abs_offdiag(z.cols, int(block))
    i, j = _first_near(z.cols, float(v) - TIE_TOL, int(i), int(j))
    return min(float(v), 1.0), (i, j)


def _first_near(cols, level, i_stop, j_stop, rows=64):
    """Lexicographically first pair with ``|<c_i, c_j>| >= level``, searching
    only up to ``(i_stop, j_stop)``, which is known to qualify."""
    for i0 in range(0, i_stop + 1, rows):
        i1 = min(i0 + rows, i_stop + 1)
        g = np.abs(cols[i0:i1] @ cols.T)
        for r, i in enumerate(range(i0, i1)):
            hits = np.flatnonzero(g[r, i + 1:] >= level)
            if hits.size:
                j = i + 1 + int(hits[0])
                if (i, j) < (i_stop, j_stop):
                    return i, j
                return i_stop, j_stop
    return i_stop, j_stop


def centering_constant(p):
    """``4 log p - log log p``."""
    if p < 2:
        raise InvalidP(f"centering constant needs p >= 2, got {p}")
    lp = math.log(p)
    return 4.0 * lp - math.log(lp)


def test_statistic(n, l_n, p):
    """Return ``(t_n, weak_law_stat)`` for a largest entry ``l_n``."""
    if n < 2:
        raise InsufficientSamples(f"need n >= 2, got {n}")
    if not (-RANGE_SLACK <= l_n <= 1.0 + RANGE_SLACK) or math.isnan(l_n):
        raise InvalidStatistic(f"l_n must lie in [0, 1], got {l_n!r}")
    l_n = min(max(l_n, 0.0), 1.0)
    t_n = n * l_n * l_n - centering_constant(p)
    weak = math.sqrt(n / math.log(n)) * l_n
    return t_n, weak


test_statistic.__test__ = False


def w_stat(m, c):
    """Largest absolute inner product of ``c``-shifted columns (unnormalized)."""
    if m.p < 2:
        raise InsufficientColumns(f"need p >= 2 columns, got {m.p}")
    shifted = np.ascontiguousarray(m.values.T - c)
    v, _, _ = kernels.max_abs_offdiag(shifted, DEFAULT_BLOCK)
    return float(v)


def ratio_out_of_range(n, p):
    lo, hi = RATIO_BOUNDS
    return not (lo <= n / p <= hi)


def run_test(m, block=DEFAULT_BLOCK, skip_degenerate=False):
    """Full largest-entry test on a data matrix.

    With ``skip_degenerate`` flagged columns are dropped before the maximum;
    otherwise the first one raises :class:`DegenerateColumn`. The reported
    pair uses the original 0-based column indices.
    """
    z = standardize_columns(m)
    dropped = z.degenerate_columns
    keep = list(range(z.p))
    if dropped:
        if not skip_degenerate:
            raise DegenerateColumn(dropped[0])
        z, keep = z.drop_degenerate()
    l_n, (i, j) = largest_offdiag(z, block)
    p = z.p
    warn = ratio_out_of_range(m.n, p)
    if warn:
        warnings.warn(
            f"n/p = {m.n / p:.3g} is outside [{RATIO_BOUNDS[0]}, {RATIO_BOUNDS[1]}]",
            RatioWarning,
            stacklevel=2,
        )
    t_n, weak = test_statistic(m.n, l_n, p)
    pv, clamped = pvalue_with_flag(t_n)
    return TestReport(
        n=m.n,
        p=p,
        l_n=l_n,
        arg_pair=(keep[i], keep[j]),
        t_n=t_n,
        p_value=pv,
        weak_law_stat=weak,
        pvalue_clamped=clamped,
        ratio_warning=warn,
        dropped_columns=tuple(dropped),
    )
