import math

import numpy as np
import pytest
from scipy import integrate, stats

from himdiag.influence.schemas import DataMatrix, Estimator
from himdiag.influence.stats_core import (
    chisq1_sf,
    column_moments,
    marginal_correlations,
    robust_location_scale,
    standardize,
    summarize,
)
from himdiag.utils.errors import DegenerateScale, InsufficientData, InvalidArgument


class TestColumnMoments:
    def test_three_points(self):
        """Test mean and sd of (1, 2, 3)"""
        assert column_moments(np.array([1.0, 2.0, 3.0])) == (2.0, 1.0)

    def test_constant_vector(self):
        """Test a constant vector has zero sd"""
        assert column_moments(np.array([5.0, 5.0, 5.0, 5.0])) == (5.0, 0.0)

    def test_matches_two_pass_oracle(self, rng):
        """Test agreement with an explicit two-pass summation"""
        v = rng.normal(3.0, 2.0, size=20)
        mean = sum(v) / len(v)
        sd = (sum((vi - mean) ** 2 for vi in v) / (len(v) - 1)) ** 0.5
        got_mean, got_sd = column_moments(v)
        assert got_mean == pytest.approx(mean, rel=1e-12)
        assert got_sd == pytest.approx(sd, rel=1e-12)

    def test_two_pass_oracle_many_vectors(self, rng):
        """Test agreement with exact two-pass sums across many lengths and offsets"""
        for _ in range(1000):
            size = int(rng.integers(2, 60))
            v = rng.normal(rng.uniform(-1e3, 1e3), rng.uniform(1e-2, 1e2), size=size)
            mean = math.fsum(v) / size
            sd = math.sqrt(math.fsum((v - mean) ** 2) / (size - 1))
            got_mean, got_sd = column_moments(v)
            assert got_mean == pytest.approx(mean, rel=1e-12, abs=1e-12)
            assert got_sd == pytest.approx(sd, rel=1e-8)

    def test_too_short(self):
        """Test a single value is rejected"""
        with pytest.raises(InsufficientData):
            column_moments(np.array([1.0]))


class TestRobustLocationScale:
    def test_three_points(self):
        """Test median and MAD scale of (1, 2, 3)"""
        median, scale = robust_location_scale(np.array([1.0, 2.0, 3.0]))
        assert median == 2.0
        assert scale == pytest.approx(1.4826)

    def test_outlier_does_not_move_scale(self):
        """Test the MAD of (1, 2, 3, 100) ignores the outlier"""
        median, scale = robust_location_scale(np.array([1.0, 2.0, 3.0, 100.0]))
        assert median == 2.5
        # absolute deviations 1.5, 0.5, 0.5, 97.5 have median 1.0
        assert scale == pytest.approx(1.4826 * 1.0)

    def test_normal_consistency(self, rng):
        """Test the scale estimates the standard deviation for normal data"""
        _, scale = robust_location_scale(rng.standard_normal(10_000))
        assert 0.9 <= scale <= 1.1

    def test_zero_mad(self):
        """Test zero MAD raises DegenerateScale"""
        with pytest.raises(DegenerateScale):
            robust_location_scale(np.array([1.0, 1.0, 1.0, 7.0]))


class TestStandardize:
    def test_moment_standardization(self, random_data):
        """Test moment standardization gives mean 0 and sd 1"""
        summary, z = standardize(random_data(30, 4), Estimator.MOMENT)
        np.testing.assert_allclose(z.x.mean(axis=0), 0.0, atol=1e-12)
        np.testing.assert_allclose(z.x.std(axis=0, ddof=1), 1.0, rtol=1e-12)
        assert z.y.std(ddof=1) == pytest.approx(1.0, rel=1e-12)
        assert summary.estimator is Estimator.MOMENT

    def test_robust_standardization(self, random_data):
        """Test robust standardization gives median 0 and MAD scale 1"""
        _, z = standardize(random_data(31, 3), Estimator.ROBUST)
        np.testing.assert_allclose(np.median(z.x, axis=0), 0.0, atol=1e-12)
        mad = 1.4826 * np.median(np.abs(z.x), axis=0)
        np.testing.assert_allclose(mad, 1.0, rtol=1e-12)

    def test_constant_column_named(self, rng):
        """Test a constant column is reported by index"""
        x = rng.standard_normal((10, 3))
        x[:, 2] = 4.0
        with pytest.raises(DegenerateScale) as exc_info:
            DataMatrix(x=x, y=rng.standard_normal(10))
        assert exc_info.value.column == 2

    def test_robust_zero_scale_column(self, rng):
        """Test a nonconstant column with zero MAD fails under the robust estimator"""
        x = rng.standard_normal((7, 2))
        x[:, 1] = [0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 2.0]
        data = DataMatrix(x=x, y=rng.standard_normal(7))
        with pytest.raises(DegenerateScale) as exc_info:
            summarize(data, Estimator.ROBUST)
        assert exc_info.value.column == 1


class TestMarginalCorrelations:
    def test_identical_response(self):
        """Test y = x gives (n-1)/n under the n-denominator convention"""
        x = np.array([[1.0], [2.0], [4.0], [8.0]])
        data = DataMatrix(x=x, y=x[:, 0].copy())
        assert marginal_correlations(data).rho[0] == pytest.approx(0.75, rel=1e-12)

    def test_negated_response(self, rng):
        """Test y = -x gives -(n-1)/n"""
        x = rng.standard_normal((10, 1))
        data = DataMatrix(x=x, y=-x[:, 0])
        assert marginal_correlations(data).rho[0] == pytest.approx(-0.9, rel=1e-12)

    def test_double_loop_oracle(self, rng):
        """Test agreement with explicit double-loop summation"""
        x = rng.standard_normal((8, 3))
        y = rng.standard_normal(8)
        n = 8
        expected = []
        my = sum(y) / n
        sy = (sum((v - my) ** 2 for v in y) / (n - 1)) ** 0.5
        for j in range(3):
            mx = sum(x[i, j] for i in range(n)) / n
            sx = (sum((x[i, j] - mx) ** 2 for i in range(n)) / (n - 1)) ** 0.5
            cross = sum((x[i, j] - mx) * (y[i] - my) for i in range(n))
            expected.append(cross / (n * sx * sy))
        rho = marginal_correlations(DataMatrix(x=x, y=y)).rho
        np.testing.assert_allclose(rho, expected, rtol=1e-12)

    def test_affine_invariance(self, rng):
        """Test positive rescaling and shifting of columns and response leaves rho unchanged"""
        x = rng.standard_normal((25, 6))
        y = x[:, 0] + rng.standard_normal(25)
        scale = rng.uniform(0.1, 10.0, size=6)
        shift = rng.uniform(-5.0, 5.0, size=6)
        base = marginal_correlations(DataMatrix(x=x, y=y)).rho
        moved = marginal_correlations(DataMatrix(x=x * scale + shift, y=3.5 * y - 2.0)).rho
        np.testing.assert_allclose(moved, base, rtol=1e-10, atol=1e-12)

    def test_negative_scale_flips_sign(self, rng):
        """Test a negative column scale flips exactly that correlation"""
        x = rng.standard_normal((25, 4))
        y = x[:, 1] + rng.standard_normal(25)
        base = marginal_correlations(DataMatrix(x=x, y=y)).rho
        flipped = x.copy()
        flipped[:, 2] = -4.0 * flipped[:, 2] + 1.0
        moved = marginal_correlations(DataMatrix(x=flipped, y=y)).rho
        expected = base.copy()
        expected[2] = -expected[2]
        np.testing.assert_allclose(moved, expected, rtol=1e-10, atol=1e-12)


class TestChisq1Sf:
    def test_zero(self):
        """Test P(chi2 > 0) = 1"""
        assert chisq1_sf(0.0) == 1.0

    def test_95th_percentile(self):
        """Test the 95th percentile gives 0.05"""
        assert chisq1_sf(3.841459) == pytest.approx(0.05, abs=1e-4)

    def test_unit_statistic(self):
        """Test P(chi2 > 1) = 2 * Phi(-1)"""
        assert chisq1_sf(1.0) == pytest.approx(0.317311, abs=1e-6)

    def test_integration_oracle(self):
        """Test agreement with numerical integration of the normal density on [0, 200]"""
        for t in np.linspace(0.0, 200.0, 50):
            a = np.sqrt(t)
            tail, _ = integrate.quad(stats.norm.pdf, a, a + 40.0, epsabs=0.0, epsrel=1e-13, limit=200)
            assert chisq1_sf(t) == pytest.approx(2.0 * tail, rel=1e-10)

    def test_vectorized(self):
        """Test array input returns an array matching scipy"""
        t = np.array([0.5, 2.0, 10.0])
        np.testing.assert_allclose(chisq1_sf(t), stats.chi2.sf(t, df=1), rtol=1e-12)

    def test_strictly_decreasing(self):
        """Test the tail is strictly decreasing on [0, 200]"""
        values = chisq1_sf(np.linspace(0.0, 200.0, 2001))
        assert np.all(values > 0.0)
        assert np.all(np.diff(values) < 0.0)

    def test_underflow(self):
        """Test huge statistics underflow to zero"""
        assert chisq1_sf(5000.0) == 0.0

    @pytest.mark.parametrize("t", [-1.0, np.nan, np.inf])
    def test_invalid(self, t):
        """Test negative or non-finite statistics are rejected"""
        with pytest.raises(InvalidArgument):
            chisq1_sf(t)
