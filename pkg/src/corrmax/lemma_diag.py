"""Self-normalized pair statistics used as empirical diagnostics.

All statistics are pure functions of a :class:`PairSample`, so the Monte
Carlo harness only has to draw samples and tabulate exceedances.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .corr_core import pearson_pair
from .errors import DegenerateColumn, InsufficientColumns


@dataclass(frozen=True)
class PairSample:
    """Two i.i.d. columns and, optionally, independent copies of them."""

    x1: np.ndarray
    x2: np.ndarray
    x1p: Optional[np.ndarray] = None
    x2p: Optional[np.ndarray] = None

    def __post_init__(self):
        arrays = [self.x1, self.x2, self.x1p, self.x2p]
        n = len(self.x1)
        for name, a in zip(("x1", "x2", "x1p", "x2p"), arrays):
            if a is None:
                continue
            a = np.asarray(a, dtype=np.float64)
            if a.ndim != 1 or len(a) != n:
                raise ValueError(f"{name} must be 1-d with length {n}")
            if not np.all(np.isfinite(a)):
                raise ValueError(f"{name} has non-finite entries")
            object.__setattr__(self, name, a)

    @property
    def n(self):
        return len(self.x1)


def _norms(a, b):
    na = math.sqrt(float(np.dot(a, a)))
    nb = math.sqrt(float(np.dot(b, b)))
    if na == 0.0:
        raise DegenerateColumn(0)
    if nb == 0.0:
        raise DegenerateColumn(1)
    return na, nb


def _log_scale(n):
    return math.sqrt(n / math.log(n))


def pair_self_normalized(s):
    """``sqrt(n/log n) |sum x1 x2| / (|x1| |x2|)``."""
    na, nb = _norms(s.x1, s.x2)
    return _log_scale(s.n) * abs(float(np.dot(s.x1, s.x2))) / (na * nb)


def mean_product_stat(s):
    """``n sqrt(n/log n) |mean(x1) mean(x2)| / (|x1| |x2|)``."""
    na, nb = _norms(s.x1, s.x2)
    n = s.n
    return n * _log_scale(n) * abs(float(s.x1.mean()) * float(s.x2.mean())) / (na * nb)


def symmetrized_ratio(s):
    """``sum (x1 - x1')^2 / sum x1^2``."""
    if s.x1p is None:
        raise ValueError("symmetrized_ratio needs the independent copy x1p")
    den = float(np.dot(s.x1, s.x1))
    if den == 0.0:
        raise DegenerateColumn(0)
    d = s.x1 - s.x1p
    return float(np.dot(d, d)) / den


def max_vs_single_product(s):
    """``n^{1/4} max_j |x1_j x2_j| / (|x1| |x2|)`` and the same for ``j = 1`` only."""
    na, nb = _norms(s.x1, s.x2)
    prods = np.abs(s.x1 * s.x2)
    k = s.n**0.25 / (na * nb)
    return k * float(prods.max()), k * float(prods[0])


def levy_terms(s):
    """``(max_j |V_j|, |sum_j V_j|)`` for ``V_j = xh1_j xh2_j / (|xh1| |xh2|)``, ``xh = x - x'``."""
    if s.x1p is None or s.x2p is None:
        raise ValueError("levy_terms needs both independent copies")
    h1 = s.x1 - s.x1p
    h2 = s.x2 - s.x2p
    na, nb = _norms(h1, h2)
    v = h1 * h2 / (na * nb)
    return float(np.abs(v).max()), abs(float(v.sum()))


def disjoint_pair_max(m):
    """``max_i |rho(2i-1, 2i)|`` over disjoint column pairs; an odd last column is ignored."""
    if m.p < 2:
        raise InsufficientColumns(f"need p >= 2 columns, got {m.p}")
    return max(abs(pearson_pair(m, 2 * i, 2 * i + 1)) for i in range(m.p // 2))


LEMMA_STATS = {
    "pair_self_normalized": lambda s: {"pair_self_normalized": pair_self_normalized(s)},
    "mean_product": lambda s: {"mean_product": mean_product_stat(s)},
    "symmetrized_ratio": lambda s: {"symmetrized_ratio": symmetrized_ratio(s)},
    "max_vs_single": lambda s: dict(zip(("max_stat", "single_stat"), max_vs_single_product(s))),
    "levy": lambda s: dict(zip(("max_abs_v", "abs_sum_v"), levy_terms(s))),
}
