import math

import numpy as np
import pytest
from scipy import stats

from corrmax import distributions as dist
from corrmax.distributions import (
    Rademacher,
    StandardNormal,
    StudentT,
    SymmetricPareto,
    TailSpecified,
    UniformSym,
    log_corrected_pareto,
    parse_dist,
    standardize_spec,
)
from corrmax.errors import InfiniteVariance, InvalidProbability
from corrmax.streams import RandomStream

FINITE_MOMENT_FAMILIES = [
    StandardNormal(),
    StudentT(5.0),
    StudentT(7.0, standardized=True),
    SymmetricPareto(4.0, 1.0),
    SymmetricPareto(6.0, 1.0, standardized=True),
    Rademacher(),
    UniformSym(),
]


def draws(d, count=10**6, seed=11):
    return d.sample(RandomStream(seed, 0), count)


class TestSampling:
    def test_rademacher_values(self):
        assert set(np.unique(draws(Rademacher(), 10_000))) == {-1.0, 1.0}

    def test_normal_variance(self):
        v = draws(StandardNormal()).var()
        assert 0.99 <= v <= 1.01

    def test_pareto_support(self):
        assert np.all(np.abs(draws(SymmetricPareto(4.0, 1.0), 100_000)) >= 1.0)

    def test_reproducible(self):
        d = StudentT(5.0)
        np.testing.assert_array_equal(draws(d, 1000), draws(d, 1000))
        assert not np.array_equal(draws(d, 1000, seed=1), draws(d, 1000, seed=2))

    @pytest.mark.parametrize("d", [StandardNormal(), StudentT(5.0), SymmetricPareto(4.0, 1.0), UniformSym()])
    def test_matches_scipy_law(self, d):
        # |X| against scipy's survival function, independent of our isf
        ref = {
            "normal": lambda x: 2 * stats.norm.sf(x),
            "t": lambda x: 2 * stats.t.sf(x, 5.0),
            "pareto": lambda x: stats.pareto.sf(x, 4.0),
            "uniform": lambda x: np.clip(1 - x / math.sqrt(3), 0, 1),
        }[d.family]
        x = np.abs(draws(d, 50_000))
        assert stats.kstest(x, lambda v: 1 - ref(v)).statistic < 0.01

    @pytest.mark.parametrize("d", [StudentT(5.0, standardized=True), SymmetricPareto(4.0, 1.0, standardized=True)])
    def test_standardized_draws_have_unit_variance(self, d):
        # 4th moment is finite for t5 only; just a loose check on both
        assert abs(np.mean(draws(d) ** 2) - 1) < 0.05

    def test_symmetric(self):
        x = draws(SymmetricPareto(5.0, 1.0), 200_000)
        assert abs(np.mean(x > 0) - 0.5) < 3 * 0.5 / math.sqrt(x.size) + 1e-3


class TestSurvival:
    @pytest.mark.parametrize("d", FINITE_MOMENT_FAMILIES)
    def test_at_zero(self, d):
        assert d.survival_ge(0.0) == 1.0

    def test_pareto(self):
        assert SymmetricPareto(4.0, 1.0).survival(2.0) == pytest.approx(0.0625, abs=1e-15)

    def test_rademacher(self):
        r = Rademacher()
        assert r.survival(1.5) == 0.0
        assert r.survival_ge(1.0) == 1.0
        assert r.survival(1.0) == 0.0

    def test_normal_against_scipy(self):
        x = np.linspace(0, 30, 61)
        np.testing.assert_allclose(StandardNormal().survival(x), 2 * stats.norm.sf(x), rtol=1e-12, atol=0)

    def test_t_against_scipy(self):
        x = np.linspace(0, 50, 51)
        np.testing.assert_allclose(StudentT(5.0).survival(x), 2 * stats.t.sf(x, 5.0), rtol=1e-10)

    @pytest.mark.parametrize("d", FINITE_MOMENT_FAMILIES + [log_corrected_pareto(2.0)])
    def test_nonincreasing(self, d):
        x = np.linspace(0, 20, 2001)
        assert np.all(np.diff(d.survival(x)) <= 0)

    def test_functional_wrapper(self):
        d = SymmetricPareto(4.0, 1.0)
        assert dist.survival(d, 2.0) == d.survival(2.0)

    def test_negative_x(self):
        with pytest.raises(ValueError):
            StandardNormal().survival(-1.0)


class TestQuantile:
    def test_pareto(self):
        assert SymmetricPareto(4.0, 1.0).quantile_abs(1 - 2.0**-4) == pytest.approx(2.0, abs=1e-12)

    @pytest.mark.parametrize("q", [0.01, 0.5, 0.99])
    def test_rademacher(self, q):
        assert Rademacher().quantile_abs(q) == 1.0

    @pytest.mark.parametrize("d", [StandardNormal(), StudentT(5.0), StudentT(5.0, standardized=True),
                                   SymmetricPareto(4.0, 1.0), UniformSym(), log_corrected_pareto(2.0)])
    @pytest.mark.parametrize("q", [1e-6, 0.1, 0.5, 0.9, 0.999999])
    def test_inverse(self, d, q):
        assert abs(d.survival(d.quantile_abs(q)) - (1 - q)) <= 1e-10

    @pytest.mark.parametrize("q", [0.0, 1.0])
    def test_domain(self, q):
        with pytest.raises(InvalidProbability):
            StandardNormal().quantile_abs(q)


class TestMoments:
    @pytest.mark.parametrize("d", [StandardNormal(), StudentT(5.0, standardized=True),
                                   SymmetricPareto(4.0, 1.0, standardized=True), Rademacher(standardized=True),
                                   UniformSym(standardized=True), log_corrected_pareto(2.0, standardized=True)])
    def test_unit_second_moment(self, d):
        assert abs(d.moment_abs(2.0) - 1.0) <= 1e-8

    def test_t5_fourth(self):
        assert StudentT(5.0, standardized=True).moment_abs(4.0) == pytest.approx(9.0, rel=5e-3)
        assert StudentT(5.0, standardized=True).moment_abs(4.0, method="quadrature") == pytest.approx(9.0, rel=5e-3)

    def test_pareto_third(self):
        d = SymmetricPareto(4.0, 1.0, standardized=True)
        assert d.moment_abs(3.0) == pytest.approx(math.sqrt(2), rel=5e-3)
        assert d.moment_abs(3.0, method="quadrature") == pytest.approx(math.sqrt(2), rel=5e-3)

    def test_infinite(self):
        assert SymmetricPareto(4.0, 1.0).moment_abs(4.0) == math.inf
        assert StudentT(5.0).moment_abs(6.0) == math.inf
        assert log_corrected_pareto(0.5).moment_abs(6.0) == math.inf
        assert math.isfinite(log_corrected_pareto(2.0).moment_abs(5.5))

    def test_low_order_moment_exists_for_boundary_law(self):
        for d in (StudentT(2.7, standardized=True), SymmetricPareto(2.7, 1.0, standardized=True)):
            assert math.isfinite(d.moment_abs(8 / 3 - 0.01))

    @pytest.mark.parametrize("d", [StandardNormal(), StudentT(5.0), SymmetricPareto(4.0, 1.0), UniformSym(),
                                   StudentT(9.0, standardized=True)])
    @pytest.mark.parametrize("r", [0.5, 1.0, 2.5, 3.5])
    def test_closed_vs_quadrature(self, d, r):
        closed = d.moment_abs(r, method="closed")
        quad = d.moment_abs(r, method="quadrature")
        if math.isinf(closed):
            assert math.isinf(quad)
        else:
            assert quad == pytest.approx(closed, rel=1e-7)

    @pytest.mark.parametrize("d", FINITE_MOMENT_FAMILIES)
    @pytest.mark.parametrize("r", [1.0, 2.5])
    def test_monte_carlo(self, d, r):
        a = np.abs(draws(d, 10**6, seed=5)) ** r
        se = a.std(ddof=1) / math.sqrt(a.size)
        assert abs(a.mean() - d.moment_abs(r)) <= 3 * se + 1e-12

    def test_positive_order(self):
        with pytest.raises(ValueError):
            StandardNormal().moment_abs(0.0)


class TestStandardize:
    def test_normal_unchanged(self):
        assert standardize_spec(StandardNormal()).scale == 1.0

    def test_pareto_scale(self):
        assert standardize_spec(SymmetricPareto(4.0, 1.0)).scale == pytest.approx(1 / math.sqrt(2), abs=1e-15)

    def test_uniform_unchanged(self):
        assert standardize_spec(UniformSym()).scale == pytest.approx(1.0, abs=1e-15)

    def test_infinite_variance(self):
        with pytest.raises(InfiniteVariance):
            SymmetricPareto(2.0, 1.0)
        with pytest.raises(InfiniteVariance):
            StudentT(2.0)


class TestTailSpecified:
    def test_exponential_tail(self):
        d = TailSpecified(lambda x: np.exp(-(x - 1.0)), x0=1.0, label="exp")
        assert d.survival(3.0) == pytest.approx(math.exp(-2), rel=1e-15)
        assert d.moment_abs(2.0) == pytest.approx(5.0, rel=1e-7)  # E(1+E)^2 = 1 + 2 + 2

    def test_rejects_bad_survival(self):
        with pytest.raises(ValueError):
            TailSpecified(lambda x: 0.5 * np.ones_like(x), x0=1.0)
        with pytest.raises(ValueError):
            TailSpecified(lambda x: np.minimum(1.0, x / 1.0), x0=1.0)

    def test_heavy_tail_rejected(self):
        with pytest.raises(InfiniteVariance):
            TailSpecified(lambda x: 1.0 / x, x0=1.0, tail_index_hint=1.0)


class TestParse:
    @pytest.mark.parametrize("text, cls", [("normal", StandardNormal), ("t:5", StudentT), ("pareto:4,1", SymmetricPareto),
                                           ("rademacher", Rademacher), ("uniform", UniformSym)])
    def test_families(self, text, cls):
        assert isinstance(parse_dist(text), cls)

    def test_standardized_flag(self):
        assert parse_dist("pareto:4", standardized=True).scale == pytest.approx(1 / math.sqrt(2))

    @pytest.mark.parametrize("bad", ["cauchy", "t:x", "pareto:1.5"])
    def test_bad(self, bad):
        with pytest.raises(ValueError):
            parse_dist(bad)
