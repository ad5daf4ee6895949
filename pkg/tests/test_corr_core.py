import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from corrmax.corr_core import (
    DataMatrix,
    RatioWarning,
    centering_constant,
    largest_offdiag,
    pearson_pair,
    run_test,
    standardize_columns,
    test_statistic,
    w_stat,
)
from corrmax.errors import (
    DegenerateColumn,
    InsufficientColumns,
    InsufficientSamples,
    InvalidP,
    InvalidStatistic,
)

from .conftest import brute_force_max


def mat(*cols):
    return DataMatrix(np.column_stack(cols).astype(float))


class TestStandardize:
    def test_symmetric_triple(self):
        z = standardize_columns(mat([1, 2, 3], [1, 0, 0]))
        np.testing.assert_allclose(z.columns[:, 0], [-1 / math.sqrt(2), 0, 1 / math.sqrt(2)], atol=1e-15)

    def test_hand_computed_column(self):
        # mean 7/3, centered (-4, -1, 5)/3, norm sqrt(42)/3
        z = standardize_columns(mat([1, 2, 4], [0, 1, 0]))
        np.testing.assert_allclose(z.columns[:, 0], np.array([-4, -1, 5]) / math.sqrt(42), atol=1e-15)

    def test_constant_column_flagged(self):
        z = standardize_columns(mat([5, 5, 5], [1, 2, 3]))
        assert z.degenerate_columns == (0,)

    def test_constant_float_column_flagged(self):
        z = standardize_columns(mat([0.1] * 7, np.arange(7)))
        assert z.degenerate_columns == (0,)

    def test_input_not_modified(self):
        m = mat([1, 2, 4], [3, 1, 2])
        before = m.values.copy()
        standardize_columns(m)
        np.testing.assert_array_equal(m.values, before)

    def test_one_sample_rejected(self):
        with pytest.raises(InsufficientSamples):
            standardize_columns(DataMatrix(np.ones((1, 3))))

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            DataMatrix(np.array([[1.0, np.nan], [2.0, 3.0]]))

    @settings(max_examples=50, deadline=None)
    @given(arrays(np.float64, st.tuples(st.integers(2, 30), st.integers(1, 6)),
                  elements=st.floats(-1e6, 1e6, allow_nan=False)))
    def test_centered_unit_norm(self, x):
        z = standardize_columns(DataMatrix(x))
        n = x.shape[0]
        for j in range(x.shape[1]):
            if j in z.degenerate_columns:
                continue
            col = z.columns[:, j]
            assert abs(col.sum()) <= 1e-9 * n
            assert abs((col**2).sum() - 1) <= 1e-9


class TestPearsonPair:
    def test_linear(self):
        assert pearson_pair(mat([1, 2, 3], [2, 4, 6]), 0, 1) == pytest.approx(1.0, abs=1e-15)

    def test_reversal(self):
        assert pearson_pair(mat([1, 2, 3], [3, 2, 1]), 0, 1) == pytest.approx(-1.0, abs=1e-15)

    def test_hand_value(self):
        # centered (-4,-1,5)/3 and (-2,0,2): dot 18/3, norms sqrt(42)/3 and sqrt(8)
        assert pearson_pair(mat([1, 2, 4], [1, 3, 5]), 0, 1) == pytest.approx(9 / math.sqrt(84), abs=1e-14)
        assert 9 / math.sqrt(84) == pytest.approx(0.981981, abs=1e-6)

    def test_degenerate(self):
        with pytest.raises(DegenerateColumn) as exc:
            pearson_pair(mat([1, 2, 3], [4, 4, 4]), 0, 1)
        assert exc.value.index == 1

    def test_same_column_rejected(self):
        with pytest.raises(ValueError):
            pearson_pair(mat([1, 2, 3], [4, 1, 4]), 1, 1)

    def test_matches_numpy(self, rng):
        x = rng.standard_normal((40, 5))
        ref = np.corrcoef(x, rowvar=False)
        m = DataMatrix(x)
        for i in range(5):
            for j in range(i + 1, 5):
                assert pearson_pair(m, i, j) == pytest.approx(ref[i, j], abs=1e-13)


class TestLargestOffdiag:
    def test_single_pair(self, backend):
        m = mat([1, 2, 4], [1, 3, 5])
        l, pair = largest_offdiag(standardize_columns(m))
        assert pair == (0, 1)
        assert l == pytest.approx(abs(pearson_pair(m, 0, 1)), abs=1e-15)

    def test_orthogonal_columns(self, backend):
        h = np.array([[1, 1, 1, 1], [1, -1, 1, -1], [1, 1, -1, -1], [1, -1, -1, 1]], float)
        # columns 1..3 of a Hadamard matrix are centered and orthogonal; add a fourth
        x = np.column_stack([h[:, 1:], np.zeros(4)])
        x = np.vstack([x, x])
        x[:, 3] = [1, -1, -1, 1, -1, 1, 1, -1]
        l, _ = largest_offdiag(standardize_columns(DataMatrix(x)))
        assert l == pytest.approx(0.0, abs=1e-15)

    def test_random_matches_brute_force(self, backend, rng):
        x = rng.standard_normal((20, 10))
        l, pair = largest_offdiag(standardize_columns(DataMatrix(x)))
        ref, ref_pair = brute_force_max(x)
        assert abs(l - ref) <= 1e-12
        assert pair == ref_pair

    def test_block_sizes_agree(self, backend, rng):
        z = standardize_columns(DataMatrix(rng.standard_normal((33, 47))))
        results = {largest_offdiag(z, b) for b in (1, 2, 3, 5, 16, 64, 100)}
        vals = [r[0] for r in results]
        assert max(vals) - min(vals) <= 1e-12
        assert len({r[1] for r in results}) == 1

    def test_tie_breaks_lexicographically(self, backend):
        a = np.array([1.0, -1, 2, 0, -2])
        x = np.column_stack([a, np.array([0.0, 3, -1, 1, -3]), a, a])
        l, pair = largest_offdiag(standardize_columns(DataMatrix(x)), block=1)
        assert pair == (0, 2)
        assert l == pytest.approx(1.0, abs=1e-15)

    def test_degenerate_rejected(self):
        z = standardize_columns(mat([1, 2, 3], [2, 2, 2], [3, 1, 2]))
        with pytest.raises(DegenerateColumn):
            largest_offdiag(z)

    def test_needs_two_columns(self):
        z = standardize_columns(DataMatrix(np.array([[1.0], [2.0], [4.0]])))
        with pytest.raises(InsufficientColumns):
            largest_offdiag(z)

    def test_two_samples_give_unit_correlation(self, backend, rng):
        x = rng.standard_normal((2, 6))
        z = standardize_columns(DataMatrix(x))
        for i in range(6):
            for j in range(i + 1, 6):
                assert abs(abs(float(z.cols[i] @ z.cols[j])) - 1.0) <= 4e-16
        l, _ = largest_offdiag(z)
        assert abs(l - 1.0) <= 4e-16


class TestAffineInvariance:
    @settings(max_examples=40, deadline=None)
    @given(
        st.integers(0, 2**32 - 1),
        arrays(np.float64, 5, elements=st.floats(0.01, 100)),
        arrays(np.float64, 5, elements=st.floats(-1e3, 1e3)),
        arrays(np.bool_, 5),
    )
    def test_largest_entry_unchanged(self, seed, scale, shift, flip):
        x = np.random.default_rng(seed).standard_normal((25, 5))
        a = np.where(flip, -scale, scale)
        y = x * a + shift
        l1, p1 = largest_offdiag(standardize_columns(DataMatrix(x)))
        l2, p2 = largest_offdiag(standardize_columns(DataMatrix(y)))
        assert abs(l1 - l2) <= 1e-9 * l1
        assert abs(abs(pearson_pair(DataMatrix(x), 0, 1)) - abs(pearson_pair(DataMatrix(y), 0, 1))) <= 1e-9


class TestCenteringConstant:
    # closed forms evaluated with mpmath at 30 digits
    def test_p2(self):
        assert centering_constant(2) == pytest.approx(3.1391016428214456, abs=1e-12)

    def test_p10(self):
        assert centering_constant(10) == pytest.approx(8.376308, abs=1e-6)

    def test_p15_near_e_to_e(self):
        assert centering_constant(15) == pytest.approx(4 * math.log(15) - math.log(math.log(15)), abs=1e-14)
        # at p = e^e the constant is exactly 4e - 1
        assert 4 * math.e - math.log(math.e) == pytest.approx(9.873, abs=1e-3)
        assert abs(centering_constant(15) - (4 * math.e - 1)) < 0.2

    def test_small_p(self):
        with pytest.raises(InvalidP):
            centering_constant(1)


class TestTestStatistic:
    def test_arithmetic(self):
        t, weak = test_statistic(100, 0.5, 10)
        assert t == pytest.approx(16.623692, abs=1e-6)
        assert weak == pytest.approx(math.sqrt(100 / math.log(100)) * 0.5, abs=1e-15)

    def test_zero(self):
        t, weak = test_statistic(50, 0.0, 10)
        assert t == -centering_constant(10)
        assert weak == 0.0

    def test_identity_at_one(self):
        t, _ = test_statistic(37, 1.0, 37)
        assert t == pytest.approx(37 - centering_constant(37), abs=1e-12)

    @pytest.mark.parametrize("bad", [-0.1, 1.01, float("nan")])
    def test_out_of_range(self, bad):
        with pytest.raises(InvalidStatistic):
            test_statistic(10, bad, 10)


class TestWStat:
    def test_constant_equals_shift(self):
        assert w_stat(DataMatrix(np.full((4, 3), 2.5)), 2.5) == 0.0

    def test_orthogonal(self):
        assert w_stat(mat([1, 1], [1, -1]), 0.0) == 0.0

    def test_matches_brute_force(self, backend):
        x = np.array([[1, 2, -1], [3, 0, 2], [-2, 1, 1], [0, 4, -3]], float)
        for c in (0.0, 1.5):
            ref = max(abs(np.dot(x[:, i] - c, x[:, j] - c)) for i in range(3) for j in range(i + 1, 3))
            assert w_stat(DataMatrix(x), c) == pytest.approx(ref, abs=1e-12)


class TestRunTest:
    def test_report_fields(self):
        r = run_test(mat([1, 2, 4], [1, 3, 5]))
        assert r.l_n == pytest.approx(9 / math.sqrt(84), abs=1e-14)
        assert r.arg_pair == (0, 1)
        assert r.t_n == test_statistic(3, r.l_n, 2)[0]

    def test_skip_degenerate_keeps_original_indices(self):
        m = mat([1, 2, 3, 4], [7, 7, 7, 7], [4, 3, 1, 2], [1, 2, 3, 5])
        with pytest.raises(DegenerateColumn):
            run_test(m)
        r = run_test(m, skip_degenerate=True)
        assert r.dropped_columns == (1,)
        assert r.arg_pair == (0, 3)
        assert r.p == 3

    def test_ratio_warning(self, rng):
        m = DataMatrix(rng.standard_normal((100, 4)))
        with pytest.warns(RatioWarning):
            r = run_test(m)
        assert r.ratio_warning

    def test_no_warning_in_range(self, rng):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            r = run_test(DataMatrix(rng.standard_normal((30, 20))))
        assert not r.ratio_warning


class TestRoundingTies:
    def test_repeated_sign_columns(self, backend):
        # many +-1 columns repeat exactly, so |rho| = 1 is attained by several pairs
        pool = np.array([[1, -1, 1, 1, -1, -1, 1], [1, 1, -1, 1, -1, 1, -1], [-1, 1, 1, -1, 1, -1, -1]], float)
        x = pool[np.random.default_rng(5).integers(0, 3, 38)].T * np.random.default_rng(6).choice([-1.0, 1.0], 38)
        l, pair = largest_offdiag(standardize_columns(DataMatrix(x)))
        assert l == pytest.approx(1.0, abs=1e-15)
        ones = [(i, j) for i in range(38) for j in range(i + 1, 38)
                if abs(abs(np.corrcoef(x[:, i], x[:, j])[0, 1]) - 1) < 1e-9]
        assert pair == min(ones)

    def test_gap_above_tolerance_is_not_a_tie(self, backend):
        a = np.array([1.0, 2.0, 3.0, 5.0, 8.0])
        b = a + np.array([0, 0, 0, 0, 1e-3])
        x = np.column_stack([a, np.array([2.0, -1, 0, 1, 3]), b, a])
        l, pair = largest_offdiag(standardize_columns(DataMatrix(x)))
        assert pair == (0, 3)
