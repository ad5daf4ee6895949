"""Reproducible Monte Carlo experiments.

Replication ``r`` draws from its own substream ``(seed, r)`` and writes into
slot ``r`` of preallocated arrays, so results are a pure function of the
configuration whatever the number of worker threads.
"""

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import extreme_limit, kernels
from .corr_core import DEFAULT_BLOCK, centering_constant, ratio_out_of_range, standardize_rows
from .errors import DegenerateColumn, InvalidConfig
from .lemma_diag import LEMMA_STATS, PairSample
from .streams import RandomStream

MODES = ("test_stat", "weak_law", "lemma")
SUMMARY_QUANTILES = (0.05, 0.25, 0.5, 0.75, 0.95)


@dataclass(frozen=True)
class McConfig:
    dist: object
    n: int
    p: int
    reps: int
    seed: int = 1
    mode: str = "test_stat"
    lemma: str = None
    thresholds: tuple = ()
    threads: int = 1
    block: int = DEFAULT_BLOCK

    def __post_init__(self):
        if self.mode not in MODES:
            raise InvalidConfig(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.reps < 1:
            raise InvalidConfig(f"reps must be >= 1, got {self.reps}")
        if self.n < 3:
            raise InvalidConfig(f"n must be >= 3, got {self.n}")
        if self.p < 2:
            raise InvalidConfig(f"p must be >= 2, got {self.p}")
        if self.threads < 1:
            raise InvalidConfig(f"threads must be >= 1, got {self.threads}")
        if self.block < 1:
            raise InvalidConfig(f"block must be >= 1, got {self.block}")
        if self.seed < 0:
            raise InvalidConfig("seed must be non-negative")
        if self.mode == "lemma" and self.lemma not in LEMMA_STATS:
            raise InvalidConfig(f"lemma mode needs one of {sorted(LEMMA_STATS)}, got {self.lemma!r}")
        th = tuple(float(t) for t in self.thresholds)
        if any(b < a for a, b in zip(th, th[1:])):
            raise InvalidConfig("thresholds must be ascending")
        object.__setattr__(self, "thresholds", th)

    @property
    def ratio_warning(self):
        return ratio_out_of_range(self.n, self.p)

    def echo(self):
        """Configuration as reported. ``threads`` is left out on purpose: it
        never changes the results, and reports must not depend on it."""
        return {
            "dist": self.dist.describe(),
            "n": self.n,
            "p": self.p,
            "n_over_p": self.n / self.p,
            "ratio_warning": self.ratio_warning,
            "reps": self.reps,
            "seed": self.seed,
            "mode": self.mode,
            "lemma": self.lemma,
            "thresholds": list(self.thresholds),
            "block": self.block,
        }


@dataclass
class McReport:
    config: McConfig
    values: dict
    primary: str
    ks_to_limit: float = None
    summary: dict = field(default_factory=dict)
    tail_curves: dict = field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def throughput(self):
        return self.config.reps / self.wall_time if self.wall_time > 0 else math.inf

    def to_dict(self, include_runtime=False):
        out = {
            "config": self.config.echo(),
            "primary": self.primary,
            "values": {k: v.tolist() for k, v in self.values.items()},
            "ecdf_sorted": np.sort(self.values[self.primary]).tolist(),
            "summary": self.summary,
            "ks_to_limit": self.ks_to_limit,
            "tail_curves": self.tail_curves,
            "kernel_backend": kernels.BACKEND,
        }
        if include_runtime:
            out["runtime"] = {
                "threads": self.config.threads,
                "wall_time_s": self.wall_time,
                "reps_per_s": self.throughput,
            }
        return out


class Ecdf:
    """Right-continuous empirical CDF with a left-limit accessor."""

    def __init__(self, values):
        v = np.sort(np.asarray(values, dtype=np.float64))
        if v.size == 0:
            raise ValueError("ecdf needs at least one value")
        self.sorted = v

    def __call__(self, t):
        out = np.searchsorted(self.sorted, t, side="right") / self.sorted.size
        return float(out) if np.ndim(out) == 0 else out

    def left(self, t):
        out = np.searchsorted(self.sorted, t, side="left") / self.sorted.size
        return float(out) if np.ndim(out) == 0 else out


def ecdf(values, t):
    """Fraction of ``values`` that are ``<= t``."""
    return Ecdf(values)(t)


def ks_statistic(values, cdf):
    """Exact sup-distance between the empirical CDF of ``values`` and ``cdf``.

    For a continuous ``cdf`` this is the usual
    ``max_i max(i/m - F(v_(i)), F(v_(i)) - (i-1)/m)``. If ``cdf`` has a
    ``left`` method (left limits, e.g. another :class:`Ecdf`), jumps of the
    reference are accounted for too.
    """
    v = np.sort(np.asarray(values, dtype=np.float64))
    m = v.size
    if m == 0:
        raise ValueError("ks_statistic needs at least one value")
    u = np.unique(v)
    hi = np.searchsorted(v, u, side="right") / m
    lo = np.searchsorted(v, u, side="left") / m
    f = np.asarray(cdf(u), dtype=np.float64)
    left = getattr(cdf, "left", None)
    f_left = f if left is None else np.asarray(left(u), dtype=np.float64)
    d_plus = np.max(np.abs(hi - f))
    d_minus = np.max(np.abs(f_left - lo))
    return float(max(d_plus, d_minus))


def tail_curve(values, n, thresholds):
    """``n * P(stat > a)`` per threshold, with binomial standard errors."""
    v = np.asarray(values, dtype=np.float64)
    th = np.asarray(thresholds, dtype=np.float64)
    frac = (v[None, :] > th[:, None]).mean(axis=1)
    se = np.sqrt(frac * (1.0 - frac) / v.size)
    return n * frac, n * se


def _summary(v):
    q = np.quantile(v, SUMMARY_QUANTILES)
    return {
        "mean": float(v.mean()),
        "std": float(v.std(ddof=1)) if v.size > 1 else 0.0,
        "min": float(v.min()),
        "max": float(v.max()),
        "median": float(np.median(v)),
        "quantiles": {f"{p:g}": float(x) for p, x in zip(SUMMARY_QUANTILES, q)},
    }


def _stat_names(cfg):
    if cfg.mode == "test_stat":
        return ["t_n", "l_n"]
    if cfg.mode == "weak_law":
        return ["weak_law", "l_n"]
    return list(LEMMA_STATS[cfg.lemma](_probe_sample()).keys())


def _probe_sample():
    x = np.array([1.0, -1.0, 2.0])
    return PairSample(x, x[::-1].copy(), -x, x)


def _replicate_matrix(cfg, r, a_p):
    stream = RandomStream(cfg.seed, r)
    cols = cfg.dist.sample(stream, cfg.n * cfg.p).reshape(cfg.p, cfg.n)
    z, degenerate = standardize_rows(cols)
    if degenerate:
        raise DegenerateColumn(degenerate[0], replication=r)
    v, _, _ = kernels.max_abs_offdiag(z, cfg.block)
    l_n = min(float(v), 1.0)
    if cfg.mode == "test_stat":
        return {"t_n": cfg.n * l_n * l_n - a_p, "l_n": l_n}
    return {"weak_law": math.sqrt(cfg.n / math.log(cfg.n)) * l_n, "l_n": l_n}


def _replicate_lemma(cfg, r):
    stream = RandomStream(cfg.seed, r)
    n = cfg.n
    draws = cfg.dist.sample(stream, 4 * n).reshape(4, n)
    s = PairSample(draws[0], draws[1], draws[2], draws[3])
    try:
        return LEMMA_STATS[cfg.lemma](s)
    except DegenerateColumn as exc:
        raise DegenerateColumn(exc.index, replication=r) from exc


def run_replications(cfg):
    """Run ``cfg.reps`` replications and assemble an :class:`McReport`."""
    names = _stat_names(cfg)
    out = {k: np.empty(cfg.reps) for k in names}
    a_p = centering_constant(cfg.p)

    if cfg.mode == "lemma":
        one = lambda r: _replicate_lemma(cfg, r)
    else:
        one = lambda r: _replicate_matrix(cfg, r, a_p)

    def work(chunk):
        for r in chunk:
            res = one(r)
            for k in names:
                out[k][r] = res[k]

    start = time.perf_counter()
    if cfg.threads == 1:
        work(range(cfg.reps))
    else:
        chunks = [range(i, cfg.reps, cfg.threads) for i in range(cfg.threads)]
        with ThreadPoolExecutor(max_workers=cfg.threads) as ex:
            for f in [ex.submit(work, c) for c in chunks]:
                f.result()
    wall = time.perf_counter() - start

    primary = names[0]
    report = McReport(cfg, out, primary, wall_time=wall)
    report.summary = {k: _summary(v) for k, v in out.items()}
    if cfg.mode == "test_stat":
        report.ks_to_limit = ks_statistic(out["t_n"], extreme_limit.cdf)
    if cfg.mode == "lemma" and cfg.thresholds:
        for k in names:
            curve, se = tail_curve(out[k], cfg.n, cfg.thresholds)
            report.tail_curves[k] = {
                "thresholds": list(cfg.thresholds),
                "n_times_exceedance": curve.tolist(),
                "se": se.tolist(),
            }
    return report
