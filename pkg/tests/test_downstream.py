import numpy as np
import pytest
from scipy import optimize

from himdiag.downstream.lasso import (
    fold_assignment,
    kkt_violation,
    lambda_max,
    lasso_cd,
    lasso_path_cv,
    soft_threshold,
)
from himdiag.downstream.metrics import (
    eval_cp,
    eval_err,
    eval_fpr,
    eval_misclassification,
    eval_power_fdr,
)
from himdiag.downstream.schemas import EvaluationMetrics
from himdiag.downstream.screening import default_screening_size, sis_screen
from himdiag.influence.schemas import DataMatrix
from himdiag.utils.errors import ConvergenceFailure, InvalidArgument


def _standardized(rng, n, p):
    x = rng.standard_normal((n, p))
    x = (x - x.mean(axis=0)) / x.std(axis=0)
    return x


def _objective(x, y, beta, lam):
    r = (y - y.mean()) - x @ beta
    return float(r @ r) / (2 * len(y)) + lam * float(np.abs(beta).sum())


class TestSoftThreshold:
    @pytest.mark.parametrize("z, t, expected", [(3.0, 1.0, 2.0), (-0.5, 1.0, 0.0), (-3.0, 1.0, -2.0)])
    def test_examples(self, z, t, expected):
        """Test sign(z) * max(|z| - t, 0)"""
        assert soft_threshold(z, t) == expected

    def test_negative_threshold(self):
        """Test a negative threshold is rejected"""
        with pytest.raises(InvalidArgument):
            soft_threshold(1.0, -0.1)


class TestSisScreen:
    def test_default_size(self):
        """Test floor(n / log n)"""
        assert default_screening_size(100) == 21

    def test_no_screening(self, random_data):
        """Test d = p keeps every predictor"""
        result = sis_screen(random_data(30, 6), d=6)
        np.testing.assert_array_equal(np.sort(result.selected), np.arange(6))

    def test_dominant_signal_first(self, rng):
        """Test a strong predictor is ranked first"""
        x = rng.standard_normal((50, 4))
        y = 5.0 * x[:, 1] + rng.standard_normal(50)
        assert sis_screen(DataMatrix(x=x, y=y), d=2).selected[0] == 1

    def test_ties_to_lower_index(self, rng):
        """Test duplicated columns rank the lower index first"""
        base = rng.standard_normal(20)
        x = np.column_stack([rng.standard_normal(20), base, base])
        result = sis_screen(DataMatrix(x=x, y=base + rng.standard_normal(20)), d=2)
        np.testing.assert_array_equal(result.selected, [1, 2])

    def test_scale_invariance(self, random_data):
        """Test positive rescaling of a column leaves the ranking unchanged"""
        data = random_data(40, 10)
        x = data.x.copy()
        x[:, 4] *= 1000.0
        before = sis_screen(data, d=10).selected
        after = sis_screen(DataMatrix(x=x, y=data.y), d=10).selected
        np.testing.assert_array_equal(before, after)

    @pytest.mark.parametrize("d", [0, 7])
    def test_out_of_range(self, random_data, d):
        """Test d outside [1, p] is rejected"""
        with pytest.raises(InvalidArgument):
            sis_screen(random_data(20, 6), d=d)


class TestLassoCd:
    def test_full_shrinkage(self, random_data):
        """Test lambda above lambda_max zeroes every coefficient"""
        data = random_data(40, 8)
        fit = lasso_cd(data, 1.01 * lambda_max(data))
        np.testing.assert_array_equal(fit.beta, 0.0)
        assert fit.intercept == pytest.approx(data.y.mean())

    def test_single_predictor_closed_form(self, rng):
        """Test one standardized predictor gives soft_threshold(x'y / n, lambda)"""
        x = _standardized(rng, 60, 1)
        y = 0.8 * x[:, 0] + rng.standard_normal(60)
        fit = lasso_cd(DataMatrix(x=x, y=y), 0.2)
        expected = soft_threshold(float(x[:, 0] @ (y - y.mean())) / 60, 0.2)
        assert fit.beta[0] == pytest.approx(expected, rel=1e-10)

    def test_objective_against_oracle(self, rng):
        """Test the objective is no worse than a bound-constrained optimizer's"""
        n, p, lam = 40, 5, 0.1
        x = _standardized(rng, n, p)
        y = x @ np.array([1.0, -0.5, 0.0, 0.0, 0.3]) + rng.standard_normal(n)
        yc = y - y.mean()

        def split_objective(uv):
            beta = uv[:p] - uv[p:]
            r = yc - x @ beta
            grad_beta = -x.T @ r / n
            value = float(r @ r) / (2 * n) + lam * float(uv.sum())
            return value, np.concatenate([grad_beta + lam, -grad_beta + lam])

        oracle = optimize.minimize(
            split_objective, np.zeros(2 * p), jac=True, method="L-BFGS-B",
            bounds=[(0.0, None)] * (2 * p), options={"ftol": 1e-15, "gtol": 1e-12, "maxiter": 10_000},
        )
        fit = lasso_cd(DataMatrix(x=x, y=y), lam)
        assert _objective(x, y, fit.beta, lam) <= oracle.fun + 1e-8

    def test_kkt_conditions(self, random_data):
        """Test the optimality conditions hold at exit"""
        data = random_data(50, 100)
        fit = lasso_cd(data, 0.05, tol=1e-10)
        assert kkt_violation(data, fit) <= 1e-6

    def test_objective_never_increases(self, random_data):
        """Test every sweep lowers or keeps the objective"""
        trace = []
        lasso_cd(random_data(40, 30), 0.05, objective_trace=trace)
        assert len(trace) >= 2
        assert np.all(np.diff(trace) <= 1e-12)

    def test_convergence_failure(self, random_data):
        """Test an exhausted sweep budget raises with diagnostics"""
        with pytest.raises(ConvergenceFailure) as exc_info:
            lasso_cd(random_data(40, 30, signal=3.0), 0.01, max_iter=1)
        assert exc_info.value.iterations == 1
        assert exc_info.value.max_change > 0

    def test_nonpositive_lambda(self, random_data):
        """Test lambda must be positive"""
        with pytest.raises(InvalidArgument):
            lasso_cd(random_data(20, 3), 0.0)


class TestLassoPathCv:
    def test_path_shape(self, random_data):
        """Test the lambda path is descending from lambda_max to its fraction"""
        data = random_data(60, 20)
        fit = lasso_path_cv(data, n_lambda=20, folds=5, seed=3)
        assert fit.lambda_path.size == fit.cv_errors.size == 20
        assert np.all(np.diff(fit.lambda_path) < 0)
        assert fit.lambda_path[0] == pytest.approx(lambda_max(data))
        assert fit.lambda_path[-1] == pytest.approx(1e-3 * lambda_max(data))
        assert fit.lam == fit.lambda_path[int(np.argmin(fit.cv_errors))]

    def test_seeded_determinism(self, random_data):
        """Test the same seed reproduces lambda and coefficients"""
        data = random_data(60, 20)
        first = lasso_path_cv(data, n_lambda=20, folds=5, seed=11)
        second = lasso_path_cv(data, n_lambda=20, folds=5, seed=11)
        assert first.lam == second.lam
        np.testing.assert_array_equal(first.beta, second.beta)

    def test_fold_assignment_balanced(self):
        """Test folds differ in size by at most one"""
        counts = np.bincount(fold_assignment(53, 10, seed=1))
        assert counts.max() - counts.min() <= 1

    def test_kkt_at_selected_lambda(self, random_data):
        """Test the returned fit satisfies the optimality conditions"""
        data = random_data(50, 40)
        fit = lasso_path_cv(data, n_lambda=25, folds=5, seed=2, tol=1e-10)
        assert kkt_violation(data, fit) <= 1e-6

    def test_recovers_sparse_signal(self, rng):
        """Test the selected model contains a strong sparse support"""
        x = rng.standard_normal((100, 50))
        beta = np.zeros(50)
        beta[[0, 1, 4]] = (3.0, 1.5, 2.0)
        data = DataMatrix(x=x, y=x @ beta + rng.standard_normal(100))
        fit = lasso_path_cv(data, n_lambda=30, folds=5, seed=0)
        assert {0, 1, 4} <= set(fit.support.tolist())
        assert eval_err(fit.beta, beta) < 1.0

    @pytest.mark.parametrize("folds", [1, 61])
    def test_invalid_folds(self, random_data, folds):
        """Test folds outside [2, n] are rejected"""
        with pytest.raises(InvalidArgument):
            lasso_path_cv(random_data(60, 5), folds=folds)


class TestMetrics:
    def test_err(self):
        """Test the Euclidean estimation error"""
        assert eval_err(np.array([3.0, 0.0]), np.array([0.0, 4.0])) == 5.0

    def test_err_length_mismatch(self):
        """Test unequal lengths are rejected"""
        with pytest.raises(InvalidArgument):
            eval_err(np.zeros(3), np.zeros(4))

    def test_fpr(self):
        """Test false positives over true negatives"""
        assert eval_fpr([0, 1, 4, 7, 9], [0, 1, 4], p=10) == pytest.approx(2 / 7)

    def test_fpr_no_negatives(self):
        """Test a support covering every predictor is rejected"""
        with pytest.raises(InvalidArgument):
            eval_fpr([0], [0, 1], p=2)

    def test_cp(self):
        """Test coverage of the true support"""
        assert eval_cp([4, 0, 1, 9], [0, 1, 4]) == 1
        assert eval_cp([0, 1], [0, 1, 4]) == 0

    def test_perfect_detection(self):
        """Test flagging exactly the truth"""
        assert eval_power_fdr(range(10), range(10)) == (1.0, 0.0)

    def test_partial_detection(self):
        """Test two hits and one false flag"""
        power, fdr = eval_power_fdr([0, 1, 10], range(10))
        assert power == pytest.approx(0.2)
        assert fdr == pytest.approx(1 / 3)

    def test_nothing_flagged(self):
        """Test an empty flag set has zero power and zero FDR"""
        assert eval_power_fdr([], range(10)) == (0.0, 0.0)

    def test_misclassification(self):
        """Test the fraction of wrong labels"""
        y = np.array([0.0, 1.0, 1.0, 0.0])
        assert eval_misclassification(y, np.array([0, 1, 0, 0])) == 0.25

    def test_metrics_model_drops_missing(self):
        """Test only produced metrics are reported"""
        assert EvaluationMetrics(cp=1, fdr=0.0).as_dict() == {"cp": 1.0, "fdr": 0.0}
