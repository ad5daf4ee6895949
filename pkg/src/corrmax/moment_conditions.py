"""Numerical evaluation of the moment conditions under which the limit law holds.

Integrals against the law of ``|X|`` are written over survival levels:
with ``s = P(|X| > x)`` uniform, ``int g(x) dF(x) = int_0^1 g(isf(s)) ds``.
The level is further parametrized as ``s = exp(-w)`` so that far tails get
as much resolution as the bulk. Nothing here needs a density, and atoms
(Rademacher) are handled exactly.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .errors import InsufficientGrid, NumericalFailure

ABS_TOL = 1e-10
REL_TOL = 1e-6
# S(x_max) < XMAX_LEVEL / n^2 bounds the integration range
XMAX_LEVEL = 1e-16

HOLDS = "holds-likely"
FAILS = "fails-likely"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class VerdictThresholds:
    decay_factor: float = 10.0
    floor: float = 1e-3
    # series: increment of the last `series_tail` terms relative to the total
    series_tail: int = 10
    series_rel_increment: float = 0.01


def cdf_power(s, m):
    """``(1 - s)^m`` for a survival value ``s``, evaluated in the log domain."""
    s = np.asarray(s, dtype=np.float64)
    with np.errstate(divide="ignore"):
        out = np.exp(m * np.log1p(-np.minimum(s, 1.0)))
    return float(out) if out.ndim == 0 else out


def _power_gap(sx, sy, m):
    """``(1-sx)^m - (1-sy)^m`` without cancellation when both are close to 1."""
    if sy >= 1.0:
        return cdf_power(sx, m)
    a = m * math.log1p(-sx) if sx < 1.0 else -math.inf
    b = m * math.log1p(-sy)
    d = a - b
    if d < 1.0:
        return math.exp(b) * math.expm1(d)
    return math.exp(a) - math.exp(b)


def _w_breaks(w0, w1, extra=()):
    pts = [w for w in extra if w0 < w < w1]
    w = max(w0, 0.0) + 1.0
    while w < w1:
        if w > w0:
            pts.append(w)
        w *= 2.0
    return sorted(set(pts))


def product_survival(d, x):
    """``P(|X1 X2| >= x)`` for independent copies of ``X``."""
    if x <= 0:
        return 1.0
    lo, hi = d.support
    if lo * lo >= x:
        return 1.0
    if hi * hi < x:
        return 0.0

    def h(w):
        s = math.exp(-w)
        u = float(d.isf(s))
        if u <= 0.0:
            return 0.0
        return float(d.survival_ge(x / u)) * s

    # isf(e^-w) = x / lo is where the integrand stops being 1
    extra = []
    if lo > 0:
        sb = float(d.survival(x / lo))
        if sb > 0:
            extra.append(-math.log(sb))
    # the part beyond w1 is at most e^-w1; P(|X| >= sqrt x)^2 bounds the answer below
    floor = max(float(d.survival_ge(math.sqrt(x))) ** 2, 1e-300)
    w1 = min(745.0, 16.0 * math.log(10.0) - math.log(floor))
    pts = _w_breaks(0.0, w1, extra)
    edges = [0.0] + pts + [w1]
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        v, _ = integrate.quad(h, a, b, limit=200, epsabs=0.0, epsrel=1e-10)
        total += v
    return min(1.0, max(0.0, total))


def tail_ratios(d, x):
    """``(r14, r15, r_marginal)`` at ``x > e``.

    ``r14 = x^6 P(|X1 X2| >= x)``, ``r15 = r14 / log^3 x`` and
    ``r_marginal = x^6 P(|X| >= x) / log^{3/2} x``.
    """
    if not x > math.e:
        raise ValueError(f"tail ratios need x > e, got {x}")
    lx = math.log(x)
    r14 = x**6 * product_survival(d, x)
    r15 = r14 / lx**3
    r_marg = x**6 * float(d.survival_ge(x)) / lx**1.5
    return r14, r15, r_marg


def integral_16(d, n):
    """``n^2 int_{c}^{inf} (F^{n-1}(x) - F^{n-1}(sqrt(n log n)/x)) dF(x)``, ``c = (n log n)^{1/4}``.

    ``F(x) = P(|X| <= x)``. Powers of ``F`` are taken in the log domain and
    the difference is formed with ``expm1`` when both terms are near 1.
    """
    if n < 3:
        raise ValueError(f"integral_16 needs n >= 3, got {n}")
    m = n - 1
    nl = n * math.log(n)
    cut = nl**0.25
    root = math.sqrt(nl)
    s0 = float(d.survival_ge(cut))
    if s0 <= 0.0:
        return 0.0
    w0 = -math.log(s0)
    w1 = max(math.log(n * n / XMAX_LEVEL), w0 + 1.0)

    def g(w):
        s = math.exp(-w)
        x = float(d.isf(s))
        sx = float(d.survival(x))
        sy = float(d.survival(root / x))
        return _power_gap(sx, sy, m) * s

    # kink where root / x crosses the bottom of the support
    extra = []
    lo, _ = d.support
    if lo > 0:
        sb = float(d.survival(root / lo))
        if sb > 0:
            extra.append(-math.log(sb))
    edges = [w0] + _w_breaks(w0, w1, extra) + [w1]
    eps_abs = ABS_TOL / (n * n)
    total, err = 0.0, 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        v, e, info, *msg = integrate.quad(
            g, a, b, limit=400, epsabs=eps_abs / len(edges), epsrel=REL_TOL, full_output=1
        )
        total += v
        err += e
    value = n * n * total
    bound = max(ABS_TOL, REL_TOL * abs(value))
    if not math.isfinite(value) or n * n * err > 10 * bound:
        raise NumericalFailure(
            "integral_16 quadrature did not converge",
            {"n": n, "value": value, "abs_error": n * n * err, "family": d.family},
        )
    if value < -1e-12:
        raise NumericalFailure("integral_16 came out negative", {"n": n, "value": value})
    return max(value, 0.0)


def series_111(d, n_max):
    """Terms ``n int_c^inf (...) dF = integral_16(n) / n`` for ``n = 3..n_max`` and running sums."""
    if n_max < 3:
        raise ValueError(f"series_111 needs n_max >= 3, got {n_max}")
    ns = np.arange(3, n_max + 1)
    terms = np.array([integral_16(d, int(n)) / n for n in ns])
    return ns, terms, np.cumsum(terms)


def trend_verdict(values, thresholds=VerdictThresholds()):
    """Classify a sequence indexed by an increasing grid.

    ``holds-likely`` when it falls by at least ``decay_factor`` from first to
    last value and ends below ``floor``; ``fails-likely`` when it is
    nondecreasing over the top half of the grid; otherwise ``inconclusive``.
    """
    v = np.asarray(values, dtype=np.float64)
    first, last = v[0], v[-1]
    if last < thresholds.floor and (last == 0.0 or first >= thresholds.decay_factor * last):
        return HOLDS
    top = v[len(v) // 2:]
    if np.all(np.diff(top) >= 0):
        return FAILS
    return INCONCLUSIVE


def series_verdict(terms, partial, thresholds=VerdictThresholds()):
    """``holds-likely`` when the last terms add under 1% to the total."""
    terms = np.asarray(terms, dtype=np.float64)
    total = partial[-1]
    k = min(thresholds.series_tail, len(terms))
    inc = float(terms[-k:].sum())
    if total == 0.0 or inc <= thresholds.series_rel_increment * total:
        return HOLDS
    half = terms[len(terms) // 2:]
    if np.all(np.diff(half) >= 0):
        return FAILS
    return INCONCLUSIVE


def _check_grid(grid, what):
    g = np.asarray(grid, dtype=np.float64)
    if len(g) < 4 or not np.all(np.diff(g) > 0) or g[-1] < 10 * g[0]:
        raise InsufficientGrid(f"{what} needs >= 4 increasing points spanning a decade, got {list(grid)}")


@dataclass
class ConditionReport:
    dist: object
    n_grid: list
    integral16: list
    tail_x_grid: list = field(default_factory=list)
    ratios: list = field(default_factory=list)
    series_n: list = field(default_factory=list)
    series111_terms: list = field(default_factory=list)
    series111_partial: list = field(default_factory=list)
    verdicts: dict = field(default_factory=dict)
    thresholds: VerdictThresholds = VerdictThresholds()

    def to_dict(self):
        return {
            "dist": self.dist.describe(),
            "n_grid": [int(n) for n in self.n_grid],
            "integral16": [float(v) for v in self.integral16],
            "series": {
                "n": [int(n) for n in self.series_n],
                "terms": [float(v) for v in self.series111_terms],
                "partial_sums": [float(v) for v in self.series111_partial],
            },
            "tail_x_grid": [float(x) for x in self.tail_x_grid],
            "ratios": [
                {"r14": float(a), "r15": float(b), "r_marginal": float(c)} for a, b, c in self.ratios
            ],
            "verdicts": dict(self.verdicts),
            "thresholds": {
                "decay_factor": self.thresholds.decay_factor,
                "floor": self.thresholds.floor,
                "series_tail": self.thresholds.series_tail,
                "series_rel_increment": self.thresholds.series_rel_increment,
            },
        }


def condition_verdict(report, thresholds=None):
    """Per-condition trend verdicts for a filled :class:`ConditionReport`."""
    th = thresholds or report.thresholds
    _check_grid(report.n_grid, "n_grid")
    out = {"integral16": trend_verdict(report.integral16, th)}
    if len(report.series111_terms):
        out["series111"] = series_verdict(report.series111_terms, report.series111_partial, th)
    if len(report.ratios):
        _check_grid(report.tail_x_grid, "tail_x_grid")
        r = np.asarray(report.ratios)
        for k, name in enumerate(("r14", "r15", "r_marginal")):
            out[name] = trend_verdict(r[:, k], th)
    return out


def condition_report(d, n_grid, x_grid=(), series_n_max=None, thresholds=VerdictThresholds()):
    """Evaluate every condition for ``d`` and attach verdicts.

    ``series_n_max`` defaults to ``max(n_grid)``; pass ``0`` to skip the series.
    """
    n_grid = [int(n) for n in n_grid]
    _check_grid(n_grid, "n_grid")
    if x_grid:
        _check_grid(x_grid, "tail_x_grid")
    report = ConditionReport(
        dist=d,
        n_grid=n_grid,
        integral16=[integral_16(d, n) for n in n_grid],
        tail_x_grid=[float(x) for x in x_grid],
        ratios=[tail_ratios(d, float(x)) for x in x_grid],
        thresholds=thresholds,
    )
    n_max = max(n_grid) if series_n_max is None else int(series_n_max)
    if n_max >= 3:
        ns, terms, partial = series_111(d, n_max)
        report.series_n = ns.tolist()
        report.series111_terms = terms.tolist()
        report.series111_partial = partial.tolist()
    report.verdicts = condition_verdict(report, thresholds)
    return report
