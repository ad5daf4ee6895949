"""Type-I extreme-value limit law ``G(t) = exp(-c0 * exp(-t/2))``, ``c0 = 1/sqrt(8 pi)``."""

import math
import sys

import numpy as np

from .errors import InvalidProbability

C0 = 1.0 / math.sqrt(8.0 * math.pi)
LOG_SQRT_8PI = 0.5 * math.log(8.0 * math.pi)
PVALUE_FLOOR = 1e-300
SMALLEST_NORMAL = sys.float_info.min


def cdf(t):
    """Limit CDF; accepts scalars or arrays."""
    t = np.asarray(t, dtype=np.float64)
    with np.errstate(over="ignore"):
        out = np.exp(-C0 * np.exp(-0.5 * t))
    return out.item() if out.ndim == 0 else out


def quantile(q):
    """Inverse of :func:`cdf` on ``(0, 1)``."""
    if not (0.0 < q < 1.0):
        raise InvalidProbability(f"quantile needs 0 < q < 1, got {q!r}")
    return -2.0 * (LOG_SQRT_8PI + math.log(-math.log(q)))


def pvalue_with_flag(t_n):
    """Upper-tail probability ``1 - cdf(t_n)`` and whether it was clamped.

    Computed as ``-expm1(-c0 e^{-t/2})`` so small p-values keep their relative
    accuracy. Values below 1e-300 are replaced by the smallest normal double.
    """
    if t_n == -math.inf:
        return 1.0, False
    # exp overflows below t = -1418; the p-value is 1 there anyway
    x = C0 * math.exp(-0.5 * t_n) if t_n > -1400 else math.inf
    p = -math.expm1(-x)
    if p < PVALUE_FLOOR:
        return SMALLEST_NORMAL, True
    return p, False


def pvalue(t_n):
    return pvalue_with_flag(t_n)[0]


def sample_variate(u):
    """Inversion draw from the limit law."""
    return quantile(u)


def isf(p):
    """Inverse of :func:`pvalue`; accurate far into the upper tail where
    ``quantile(1 - p)`` loses digits."""
    if not (0.0 < p < 1.0):
        raise InvalidProbability(f"isf needs 0 < p < 1, got {p!r}")
    return -2.0 * (LOG_SQRT_8PI + math.log(-math.log1p(-p)))
