# himdiag/downstream/lasso.py
"""LASSO by cyclic coordinate descent.

Minimizes (1/2n) * ||y - b0 - X b||^2 + lam * ||b||_1 over predictors
standardized to mean 0 and unit mean square; coefficients are mapped back to
the original scale on return.
"""
from typing import List, Optional, Tuple

import numpy as np

from himdiag.config import settings
from himdiag.downstream.schemas import LassoFit
from himdiag.influence.schemas import DataMatrix
from himdiag.utils.errors import ConvergenceFailure, DegenerateScale, InvalidArgument
from himdiag.utils.logger import logger


def soft_threshold(z, t):
    if np.any(np.asarray(t) < 0):
        raise InvalidArgument("Threshold must be nonnegative")
    return np.sign(z) * np.maximum(np.abs(z) - t, 0.0)


def _standardize(x: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray, float, np.ndarray]:
    mean_x = x.mean(axis=0)
    scale_x = np.sqrt(np.mean((x - mean_x) ** 2, axis=0))
    zero = np.flatnonzero(scale_x == 0)
    if zero.size:
        raise DegenerateScale(int(zero[0]))
    mean_y = float(y.mean())
    return (x - mean_x) / scale_x, y - mean_y, mean_x, mean_y, scale_x


def _objective(xs: np.ndarray, yc: np.ndarray, beta: np.ndarray, lam: float) -> float:
    r = yc - xs @ beta
    return float(r @ r) / (2 * xs.shape[0]) + lam * float(np.abs(beta).sum())


def _sweep(xs, r, beta, lam, columns) -> float:
    """One cyclic pass over the given columns; updates r and beta in place"""
    n = xs.shape[0]
    biggest = 0.0
    for j in columns:
        old = beta[j]
        z = old + float(xs[:, j] @ r) / n
        new = float(np.sign(z) * max(abs(z) - lam, 0.0))
        if new != old:
            r -= xs[:, j] * (new - old)
            beta[j] = new
            biggest = max(biggest, abs(new - old))
    return biggest


def _coordinate_descent(
    xs: np.ndarray,
    yc: np.ndarray,
    lam: float,
    beta: np.ndarray,
    tol: float,
    max_iter: int,
    objective_trace: Optional[List[float]] = None,
) -> Tuple[np.ndarray, int]:
    """Full sweeps alternate with sweeps over the current nonzero set until a
    full sweep moves no coefficient by more than tol.

    A full sweep first screens every coordinate with one gradient evaluation;
    zero coefficients whose |x_j'r/n| <= lam would stay at zero and are skipped.
    """
    beta = beta.copy()
    n = xs.shape[0]
    r = yc - xs @ beta
    sweeps = 0
    change = np.inf
    while sweeps < max_iter:
        z = beta + xs.T @ r / n
        candidates = np.flatnonzero((beta != 0) | (np.abs(z) > lam))
        change = _sweep(xs, r, beta, lam, candidates)
        sweeps += 1
        if objective_trace is not None:
            objective_trace.append(_objective(xs, yc, beta, lam))
        if change <= tol:
            return beta, sweeps
        active = np.flatnonzero(beta)
        while sweeps < max_iter:
            inner = _sweep(xs, r, beta, lam, active)
            sweeps += 1
            if objective_trace is not None:
                objective_trace.append(_objective(xs, yc, beta, lam))
            if inner <= tol:
                break
    raise ConvergenceFailure(sweeps, change)


def _to_original_scale(beta_std, mean_x, mean_y, scale_x) -> Tuple[np.ndarray, float]:
    beta = beta_std / scale_x
    return beta, mean_y - float(mean_x @ beta)


def lambda_max(data: DataMatrix) -> float:
    xs, yc, *_ = _standardize(data.x, data.y)
    return float(np.max(np.abs(xs.T @ yc))) / data.n


def lasso_cd(
    data: DataMatrix,
    lam: float,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
    objective_trace: Optional[List[float]] = None,
) -> LassoFit:
    """Single-lambda LASSO fit"""
    if not lam > 0:
        raise InvalidArgument(f"lambda must be positive, got {lam}")
    tol = settings.lasso_tol if tol is None else tol
    max_iter = settings.lasso_max_iter if max_iter is None else max_iter
    xs, yc, mean_x, mean_y, scale_x = _standardize(data.x, data.y)
    beta_std, sweeps = _coordinate_descent(xs, yc, lam, np.zeros(data.p), tol, max_iter, objective_trace)
    beta, intercept = _to_original_scale(beta_std, mean_x, mean_y, scale_x)
    return LassoFit(
        beta=beta,
        intercept=intercept,
        lam=float(lam),
        lambda_path=np.array([lam], dtype=np.float64),
        cv_errors=np.array([], dtype=np.float64),
        folds=0,
        seed=None,
        sweeps=sweeps,
    )


def lambda_path(data: DataMatrix, n_lambda: Optional[int] = None, min_ratio: Optional[float] = None) -> np.ndarray:
    """Descending log-spaced grid from lambda_max down to min_ratio * lambda_max"""
    n_lambda = settings.lasso_n_lambda if n_lambda is None else n_lambda
    min_ratio = settings.lasso_min_ratio if min_ratio is None else min_ratio
    if n_lambda < 1:
        raise InvalidArgument("n_lambda must be at least 1")
    top = lambda_max(data)
    if top <= 0:
        raise DegenerateScale(message="Response is uncorrelated with every predictor; lambda_max is zero")
    return top * np.logspace(0.0, np.log10(min_ratio), n_lambda)


def _path_coefficients(xs, yc, lambdas, tol, max_iter) -> Tuple[np.ndarray, int]:
    coefs = np.zeros((lambdas.size, xs.shape[1]))
    beta = np.zeros(xs.shape[1])
    total = 0
    for i, lam in enumerate(lambdas):
        beta, sweeps = _coordinate_descent(xs, yc, lam, beta, tol, max_iter)
        coefs[i] = beta
        total += sweeps
    return coefs, total


def fold_assignment(n: int, folds: int, seed: int) -> np.ndarray:
    """Fold label per observation; a pure function of (seed, n, folds)"""
    order = np.random.default_rng(seed).permutation(n)
    labels = np.empty(n, dtype=np.int64)
    labels[order] = np.arange(n) % folds
    return labels


def lasso_path_cv(
    data: DataMatrix,
    n_lambda: Optional[int] = None,
    folds: Optional[int] = None,
    seed: int = 0,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
) -> LassoFit:
    """Warm-started path with K-fold cross-validation; returns the fit at the CV-minimizing lambda"""
    folds = settings.cv_folds if folds is None else int(folds)
    tol = settings.lasso_tol if tol is None else tol
    max_iter = settings.lasso_max_iter if max_iter is None else max_iter
    if folds < 2 or data.n < folds:
        raise InvalidArgument(f"Cross-validation needs 2 <= folds <= n, got folds = {folds}, n = {data.n}")

    lambdas = lambda_path(data, n_lambda)
    labels = fold_assignment(data.n, folds, seed)
    squared_error = np.zeros(lambdas.size)
    for fold in range(folds):
        test = labels == fold
        xs, yc, mean_x, mean_y, scale_x = _standardize(data.x[~test], data.y[~test])
        coefs, _ = _path_coefficients(xs, yc, lambdas, tol, max_iter)
        predictions = mean_y + ((data.x[test] - mean_x) / scale_x) @ coefs.T
        squared_error += np.sum((data.y[test][:, None] - predictions) ** 2, axis=0)
        logger.debug(f"CV fold {fold}: min error {squared_error.min():.4f}")
    cv_errors = squared_error / data.n

    best = int(np.argmin(cv_errors))
    xs, yc, mean_x, mean_y, scale_x = _standardize(data.x, data.y)
    coefs, sweeps = _path_coefficients(xs, yc, lambdas[: best + 1], tol, max_iter)
    beta, intercept = _to_original_scale(coefs[best], mean_x, mean_y, scale_x)
    logger.debug(f"CV selected lambda {lambdas[best]:.5g} ({best + 1} of {lambdas.size})")
    return LassoFit(
        beta=beta,
        intercept=intercept,
        lam=float(lambdas[best]),
        lambda_path=lambdas,
        cv_errors=cv_errors,
        folds=folds,
        seed=seed,
        sweeps=sweeps,
    )


def kkt_violation(data: DataMatrix, fit: LassoFit) -> float:
    """Largest violation of the LASSO optimality conditions on the standardized scale"""
    xs, yc, _, _, scale_x = _standardize(data.x, data.y)
    beta_std = fit.beta * scale_x
    grad = xs.T @ (yc - xs @ beta_std) / data.n
    nonzero = beta_std != 0
    on_support = np.abs(grad[nonzero] - fit.lam * np.sign(beta_std[nonzero]))
    off_support = np.maximum(np.abs(grad[~nonzero]) - fit.lam, 0.0)
    return float(max(on_support.max(initial=0.0), off_support.max(initial=0.0)))
