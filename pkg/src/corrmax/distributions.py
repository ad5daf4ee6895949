"""Symmetric laws for ``X`` with sampling and analytic tail/moment access.

Every law is described through the survival function of ``|X|``,
``S(x) = P(|X| > x)``; densities are never needed. A law built with
``standardized=True`` is rescaled so that ``E X^2 = 1``.
"""

import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Callable, ClassVar, Optional

import numpy as np
from scipy import integrate, special

from .errors import CorrmaxError, InfiniteVariance, InvalidProbability

BISECT_RTOL = 1e-12


def _as_array(x):
    return np.asarray(x, dtype=np.float64)


def _scalar_or_array(out, like):
    return np.asarray(out).item() if np.ndim(like) == 0 else out


def _nonnegative(x):
    x = _as_array(x)
    if np.any(x < 0):
        raise ValueError("survival is defined for x >= 0")
    return x


class Distribution:
    """Base class; subclasses implement the raw (unscaled) law."""

    family: ClassVar[str] = ""
    standardized: bool

    # hooks on the raw law, all vectorized over numpy arrays
    def _raw_survival(self, x):
        raise NotImplementedError

    def _raw_survival_ge(self, x):
        return self._raw_survival(x)

    def _raw_isf(self, s):
        raise NotImplementedError

    def _raw_moment(self, r):
        """Closed-form ``E|X|^r``, or ``None`` when only quadrature applies."""
        return None

    def _raw_sample(self, gen, count):
        raise NotImplementedError

    @property
    def _raw_support(self):
        """``(lo, hi)`` with ``P(lo <= |X| <= hi) = 1``."""
        return 0.0, math.inf

    @property
    def tail_index(self):
        return math.inf

    def _moment_is_infinite(self, r):
        return r >= self.tail_index

    def params(self):
        return {}

    # public surface -----------------------------------------------------

    @cached_property
    def scale(self):
        if not self.standardized:
            return 1.0
        m2 = self._raw_moment(2.0)
        if m2 is None:
            m2 = _moment_quadrature(self, 2.0, scale=1.0)
        if not math.isfinite(m2):
            raise InfiniteVariance(f"{self.family} has infinite variance")
        return 1.0 / math.sqrt(m2)

    @property
    def support(self):
        lo, hi = self._raw_support
        return lo * self.scale, hi * self.scale

    def survival(self, x):
        """``P(|X| > x)``."""
        out = self._raw_survival(_nonnegative(x) / self.scale)
        return _scalar_or_array(out, x)

    def survival_ge(self, x):
        """``P(|X| >= x)``; differs from :meth:`survival` only at atoms."""
        out = self._raw_survival_ge(_nonnegative(x) / self.scale)
        return _scalar_or_array(out, x)

    def isf(self, s):
        """Smallest ``x`` with ``P(|X| > x) <= s``."""
        s = _as_array(s)
        out = self.scale * self._raw_isf(s)
        return _scalar_or_array(out, s)

    def quantile_abs(self, q):
        """Smallest ``x`` with ``P(|X| <= x) >= q``."""
        q = _as_array(q)
        if np.any((q <= 0.0) | (q >= 1.0)):
            raise InvalidProbability("quantile_abs needs 0 < q < 1")
        return _scalar_or_array(self.isf(1.0 - q), q)

    def moment_abs(self, r, method="auto"):
        """``E|X|^r``; ``math.inf`` when the moment does not exist.

        ``method`` is ``"auto"`` (closed form if available), ``"closed"`` or
        ``"quadrature"``.
        """
        if r <= 0:
            raise ValueError(f"moment order must be positive, got {r}")
        if self._moment_is_infinite(r):
            return math.inf
        if method == "quadrature":
            return _moment_quadrature(self, r)
        raw = self._raw_moment(r)
        if raw is None:
            if method == "closed":
                raise CorrmaxError(f"no closed-form moment for {self.family}")
            return _moment_quadrature(self, r)
        return raw * self.scale**r

    def sample(self, stream, count):
        gen = stream.generator if hasattr(stream, "generator") else stream
        return self.scale * self._raw_sample(gen, int(count))

    def describe(self):
        return {"family": self.family, "params": self.params(), "standardized": self.standardized}

    def spec_string(self):
        vals = ",".join(repr(float(v)) for v in self.params().values())
        return f"{self.family}:{vals}" if vals else self.family


def _random_signs(gen, count):
    return np.where(gen.random(count) < 0.5, -1.0, 1.0)


@dataclass(frozen=True)
class StandardNormal(Distribution):
    family: ClassVar[str] = "normal"
    standardized: bool = False

    def _raw_survival(self, x):
        return special.erfc(np.maximum(x, 0.0) / math.sqrt(2.0))

    def _raw_isf(self, s):
        return np.where(s >= 1.0, 0.0, math.sqrt(2.0) * special.erfcinv(np.minimum(s, 1.0)))

    def _raw_moment(self, r):
        return 2.0 ** (r / 2) * math.gamma((r + 1) / 2) / math.sqrt(math.pi)

    def _raw_sample(self, gen, count):
        return gen.standard_normal(count)


@dataclass(frozen=True)
class StudentT(Distribution):
    family: ClassVar[str] = "t"
    nu: float = 5.0
    standardized: bool = False

    def __post_init__(self):
        if not self.nu > 2:
            raise InfiniteVariance(f"StudentT needs nu > 2, got {self.nu}")

    @property
    def tail_index(self):
        return self.nu

    def params(self):
        return {"nu": self.nu}

    def _raw_survival(self, x):
        return 2.0 * special.stdtr(self.nu, -np.maximum(x, 0.0))

    def _raw_isf(self, s):
        s = np.minimum(s, 1.0)
        return np.where(s >= 1.0, 0.0, -special.stdtrit(self.nu, s / 2.0))

    def _raw_moment(self, r):
        nu = self.nu
        return math.exp(
            (r / 2) * math.log(nu)
            + math.lgamma((r + 1) / 2)
            + math.lgamma((nu - r) / 2)
            - 0.5 * math.log(math.pi)
            - math.lgamma(nu / 2)
        )

    def _raw_sample(self, gen, count):
        return gen.standard_t(self.nu, count)


@dataclass(frozen=True)
class SymmetricPareto(Distribution):
    """``|X|`` is Pareto: ``P(|X| > x) = (x / x_min)^-alpha`` for ``x >= x_min``."""

    family: ClassVar[str] = "pareto"
    alpha: float = 4.0
    x_min: float = 1.0
    standardized: bool = False

    def __post_init__(self):
        if not self.alpha > 2:
            raise InfiniteVariance(f"SymmetricPareto needs alpha > 2, got {self.alpha}")
        if not self.x_min > 0:
            raise ValueError("x_min must be positive")

    @property
    def tail_index(self):
        return self.alpha

    @property
    def _raw_support(self):
        return self.x_min, math.inf

    def params(self):
        return {"alpha": self.alpha, "x_min": self.x_min}

    def _raw_survival(self, x):
        with np.errstate(divide="ignore"):
            return np.where(x < self.x_min, 1.0, (np.maximum(x, self.x_min) / self.x_min) ** -self.alpha)

    def _raw_isf(self, s):
        with np.errstate(divide="ignore"):
            return np.where(s >= 1.0, self.x_min, self.x_min * np.minimum(s, 1.0) ** (-1.0 / self.alpha))

    def _raw_moment(self, r):
        return self.alpha * self.x_min**r / (self.alpha - r)

    def _raw_sample(self, gen, count):
        u = gen.random(count)
        mag = self.x_min * (1.0 - u) ** (-1.0 / self.alpha)
        return mag * _random_signs(gen, count)


@dataclass(frozen=True)
class Rademacher(Distribution):
    family: ClassVar[str] = "rademacher"
    standardized: bool = False

    @property
    def _raw_support(self):
        return 1.0, 1.0

    def _raw_survival(self, x):
        return np.where(x < 1.0, 1.0, 0.0)

    def _raw_survival_ge(self, x):
        return np.where(x <= 1.0, 1.0, 0.0)

    def _raw_isf(self, s):
        return np.where(s >= 1.0, 0.0, 1.0)

    def _raw_moment(self, r):
        return 1.0

    def _raw_sample(self, gen, count):
        return _random_signs(gen, count)


@dataclass(frozen=True)
class UniformSym(Distribution):
    family: ClassVar[str] = "uniform"
    half_width: float = math.sqrt(3.0)
    standardized: bool = False

    def __post_init__(self):
        if not self.half_width > 0:
            raise ValueError("half_width must be positive")

    @property
    def _raw_support(self):
        return 0.0, self.half_width

    def params(self):
        return {"half_width": self.half_width}

    def _raw_survival(self, x):
        return np.clip(1.0 - x / self.half_width, 0.0, 1.0)

    def _raw_isf(self, s):
        return self.half_width * (1.0 - np.clip(s, 0.0, 1.0))

    def _raw_moment(self, r):
        return self.half_width**r / (r + 1)

    def _raw_sample(self, gen, count):
        return gen.uniform(-self.half_width, self.half_width, count)


@dataclass(frozen=True)
class TailSpecified(Distribution):
    """Law given by the survival function of ``|X|`` on ``[x0, inf)``.

    ``survival_fn`` must be nonincreasing with ``survival_fn(x0) == 1``;
    below ``x0`` the survival is 1. ``tail_index`` (if known) marks the
    moment order beyond which ``E|X|^r`` is infinite; ``finite_at_index``
    says whether the moment at exactly that order is finite.
    """

    family: ClassVar[str] = "tail"
    survival_fn: Callable = field(compare=False)
    x0: float = 1.0
    tail_index_hint: Optional[float] = None
    finite_at_index: bool = False
    label: str = "tail"
    standardized: bool = False

    def __post_init__(self):
        if not self.x0 > 0:
            raise ValueError("x0 must be positive")
        s0 = float(self._eval(np.array([self.x0]))[0])
        if abs(s0 - 1.0) > 1e-9:
            raise ValueError(f"survival_fn(x0) must be 1, got {s0}")
        grid = self.x0 * np.geomspace(1.0, 1e8, 400)
        vals = self._eval(grid)
        if np.any(np.diff(vals) > 1e-15) or np.any(vals < 0):
            raise ValueError("survival_fn must be nonincreasing and nonnegative")
        if vals[-1] > 1e-6:
            raise ValueError("survival_fn does not decay to 0")
        if self.tail_index_hint is not None and (
            self.tail_index_hint < 2 or (self.tail_index_hint == 2 and not self.finite_at_index)
        ):
            raise InfiniteVariance("tail index <= 2 means infinite variance")
        m2 = _moment_quadrature(self, 2.0, scale=1.0)
        if not math.isfinite(m2):
            raise InfiniteVariance(f"{self.label}: E X^2 does not converge")

    @property
    def tail_index(self):
        return math.inf if self.tail_index_hint is None else self.tail_index_hint

    def _moment_is_infinite(self, r):
        t = self.tail_index
        return r > t or (r == t and not self.finite_at_index)

    @property
    def _raw_support(self):
        return self.x0, math.inf

    def params(self):
        return {"label": self.label, "x0": self.x0}

    def spec_string(self):
        return self.label

    def _eval(self, x):
        x = np.asarray(x, dtype=np.float64)
        try:
            out = np.asarray(self.survival_fn(x), dtype=np.float64)
            if out.shape != x.shape:
                raise ValueError
        except (TypeError, ValueError):
            out = np.array([float(self.survival_fn(float(v))) for v in x.ravel()]).reshape(x.shape)
        return out

    def _raw_survival(self, x):
        x = np.asarray(x, dtype=np.float64)
        out = np.ones_like(x)
        above = x >= self.x0
        if np.any(above):
            out[above] = np.clip(self._eval(x[above]), 0.0, 1.0)
        return out

    def _raw_isf(self, s):
        s = np.atleast_1d(np.asarray(s, dtype=np.float64))
        lo = np.full(s.shape, self.x0)
        hi = np.full(s.shape, 2.0 * self.x0)
        active = s < 1.0
        for _ in range(2000):
            grow = active & (self._raw_survival(hi) > s)
            if not grow.any():
                break
            hi[grow] *= 2.0
        for _ in range(200):
            if not np.any(active & (hi - lo > BISECT_RTOL * hi)):
                break
            mid = 0.5 * (lo + hi)
            le = self._raw_survival(mid) <= s
            hi = np.where(active & le, mid, hi)
            lo = np.where(active & ~le, mid, lo)
        return np.where(active, hi, self.x0)

    def _raw_sample(self, gen, count):
        u = gen.random(count)
        # 1 - u lies in (0, 1]
        mag = self._raw_isf(1.0 - u)
        return mag * _random_signs(gen, count)


def log_corrected_pareto(beta, standardized=False):
    """Boundary law ``P(|X| > x) = (x/e)^-6 (log x)^-beta`` for ``x >= e``.

    Its sixth moment is finite exactly when ``beta > 1``.
    """
    beta = float(beta)
    e = math.e

    def surv(x):
        x = np.asarray(x, dtype=np.float64)
        return (x / e) ** -6.0 * np.log(x) ** -beta

    return TailSpecified(
        surv,
        x0=e,
        tail_index_hint=6.0,
        finite_at_index=beta > 1,
        label=f"logpareto:{beta!r}",
        standardized=standardized,
    )


def _moment_quadrature(d, r, scale=None):
    """``E|X|^r = lo^r + int_lo^hi r x^(r-1) S(x) dx`` on the raw law, rescaled.

    The part above 1 is integrated in ``u = log x``, which keeps slowly
    decaying tails well conditioned.
    """
    scale = d.scale if scale is None else scale
    lo, hi = d._raw_support
    total = lo**r
    opts = dict(limit=400, epsabs=0.0, epsrel=1e-11)

    def surv(x):
        return float(d._raw_survival(np.array([x]))[0])

    a, b = lo, min(hi, 1.0)
    if b > a:
        v, _ = integrate.quad(lambda x: r * x ** (r - 1) * surv(x), a, b, **opts)
        total += v
    ulo = math.log(max(lo, 1.0))
    uhi = math.log(hi) if math.isfinite(hi) else math.inf
    if uhi > ulo:

        def f(u):
            if u > 700:
                return 0.0
            sv = surv(math.exp(u))
            if sv <= 0.0:
                return 0.0
            return r * math.exp(min(r * u + math.log(sv), 700.0))

        v, err, *rest = integrate.quad(f, ulo, uhi, full_output=1, **opts)
        ier = rest[1] if len(rest) > 1 else 0
        if not math.isfinite(v) or (ier in (1, 2, 3, 4, 5) and err > 1e-6 * max(abs(v), 1.0)):
            return math.inf
        total += v
    return total * scale**r


def standardize_spec(d):
    """Rescaled copy of ``d`` with ``E X^2 = 1``."""
    out = replace(d, standardized=True)
    _ = out.scale  # raises InfiniteVariance early
    return out


# functional surface ----------------------------------------------------------


def sample(d, stream, count):
    return d.sample(stream, count)


def survival(d, x):
    return d.survival(x)


def moment_abs(d, r, method="auto"):
    return d.moment_abs(r, method)


def quantile_abs(d, q):
    return d.quantile_abs(q)


FAMILIES = {
    "normal": lambda: StandardNormal(),
    "t": lambda nu: StudentT(float(nu)),
    "pareto": lambda alpha, x_min=1.0: SymmetricPareto(float(alpha), float(x_min)),
    "rademacher": lambda: Rademacher(),
    "uniform": lambda h=math.sqrt(3.0): UniformSym(float(h)),
    "logpareto": lambda beta: log_corrected_pareto(beta),
}


def parse_dist(text, standardized=False):
    """Build a law from ``name[:p1,p2,...]``, e.g. ``t:5`` or ``pareto:4,1``."""
    name, _, rest = text.strip().partition(":")
    name = name.strip().lower()
    if name not in FAMILIES:
        raise CorrmaxError(f"unknown distribution {name!r}; choose from {sorted(FAMILIES)}")
    try:
        args = [float(v) for v in rest.split(",") if v.strip()]
        d = FAMILIES[name](*args)
    except TypeError as exc:
        raise CorrmaxError(f"bad parameters for {name!r}: {rest!r}") from exc
    except ValueError as exc:
        if isinstance(exc, CorrmaxError):
            raise
        raise CorrmaxError(f"bad parameters for {name!r}: {exc}") from exc
    return standardize_spec(d) if standardized else d
