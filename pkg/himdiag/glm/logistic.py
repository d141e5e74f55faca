# himdiag/glm/logistic.py
"""Newton / IRLS fits for canonical-link exponential-family regressions.

The negative log-likelihood per observation is -y * theta + b(theta) up to a
term free of theta; a family supplies b and its first two derivatives.
Binomial with the logit link is the shipped family.
"""
from abc import ABC, abstractmethod
from typing import Optional, Tuple

import numpy as np
from scipy.special import expit

from himdiag.config import settings
from himdiag.glm.schemas import LogisticFit, MarginalGlmFit
from himdiag.utils.errors import DegenerateResponse, DegenerateScale, FitFailure, InvalidArgument
from himdiag.utils.logger import logger


class ExponentialFamily(ABC):
    """Canonical-link family described by its cumulant function b(theta)"""

    name = "family"

    @abstractmethod
    def cumulant(self, theta: np.ndarray) -> np.ndarray:
        """b(theta)"""

    @abstractmethod
    def mean(self, theta: np.ndarray) -> np.ndarray:
        """b'(theta)"""

    @abstractmethod
    def variance(self, theta: np.ndarray) -> np.ndarray:
        """b''(theta)"""

    def loglik(self, y: np.ndarray, theta: np.ndarray, axis: int = 0) -> np.ndarray:
        return np.sum(y * theta - self.cumulant(theta), axis=axis)


class Binomial(ExponentialFamily):
    name = "binomial"

    def cumulant(self, theta):
        return np.logaddexp(0.0, theta)

    def mean(self, theta):
        return expit(theta)

    def variance(self, theta):
        mu = expit(theta)
        return mu * (1.0 - mu)


BINOMIAL = Binomial()


def check_binary_response(y: np.ndarray) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64)
    if not np.all((y == 0) | (y == 1)):
        raise InvalidArgument("Binary response must contain only 0 and 1")
    if y.min() == y.max():
        raise DegenerateResponse("Binary response has a single class")
    return y


def fit_marginal_batch(
    x: np.ndarray,
    y: np.ndarray,
    beta0: Optional[np.ndarray] = None,
    beta1: Optional[np.ndarray] = None,
    family: ExponentialFamily = BINOMIAL,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
    cap: Optional[float] = None,
) -> MarginalGlmFit:
    """Fit y ~ beta0_j + beta1_j * x_j for every column j at once.

    Each column runs its own 2x2 Newton iteration with step halving, so the
    log-likelihood never decreases. A column stops when its largest
    coefficient change is at most tol; it is marked non-converged when the
    iteration limit is hit, the Hessian degenerates, or a coefficient exceeds
    the divergence cap (separation).
    """
    tol = settings.irls_tol if tol is None else tol
    max_iter = settings.irls_max_iter if max_iter is None else max_iter
    cap = settings.glm_divergence_cap if cap is None else cap

    x = np.asarray(x, dtype=np.float64)
    p = x.shape[1]
    b0 = np.zeros(p) if beta0 is None else np.array(beta0, dtype=np.float64)
    b1 = np.zeros(p) if beta1 is None else np.array(beta1, dtype=np.float64)
    yc = y[:, None]

    active = np.ones(p, dtype=bool)
    converged = np.zeros(p, dtype=bool)
    failed = np.zeros(p, dtype=bool)
    iterations = np.zeros(p, dtype=np.int64)
    current = family.loglik(yc, b0 + b1 * x)

    for _ in range(max_iter):
        if not active.any():
            break
        cols = np.flatnonzero(active)
        xa = x[:, cols]
        eta = b0[cols] + b1[cols] * xa
        resid = yc - family.mean(eta)
        w = family.variance(eta)

        g0 = resid.sum(axis=0)
        g1 = (resid * xa).sum(axis=0)
        h00 = w.sum(axis=0)
        h01 = (w * xa).sum(axis=0)
        h11 = (w * xa * xa).sum(axis=0)
        det = h00 * h11 - h01 * h01

        singular = ~(det > 1e-12 * np.maximum(h00 * h11, 1e-300))
        det = np.where(singular, 1.0, det)
        step0 = (h11 * g0 - h01 * g1) / det
        step1 = (h00 * g1 - h01 * g0) / det

        t = np.ones(cols.size)
        new0, new1 = b0[cols] + step0, b1[cols] + step1
        trial = family.loglik(yc, new0 + new1 * xa)
        for _ in range(settings.glm_max_halvings):
            worse = trial < current[cols] - 1e-12 * (1.0 + np.abs(current[cols]))
            if not worse.any():
                break
            t = np.where(worse, t / 2.0, t)
            new0, new1 = b0[cols] + t * step0, b1[cols] + t * step1
            trial = np.where(worse, family.loglik(yc, new0 + new1 * xa), trial)

        change = np.maximum(np.abs(new0 - b0[cols]), np.abs(new1 - b1[cols]))
        b0[cols], b1[cols] = new0, new1
        current[cols] = trial
        iterations[cols] += 1

        diverged = (np.abs(new0) > cap) | (np.abs(new1) > cap) | singular
        done = (change <= tol) & ~diverged
        failed[cols[diverged]] = True
        converged[cols[done]] = True
        active[cols[diverged | done]] = False

    # converged fits must also be stationary
    if converged.any():
        cols = np.flatnonzero(converged)
        resid = yc - family.mean(b0[cols] + b1[cols] * x[:, cols])
        grad = np.hypot(resid.sum(axis=0), (resid * x[:, cols]).sum(axis=0))
        converged[cols[grad > settings.glm_gradient_tol]] = False

    return MarginalGlmFit(beta0=b0, beta1=b1, converged=converged & ~failed, iterations=iterations)


def fit_marginal_logistic(x: np.ndarray, y: np.ndarray, **kwargs) -> Tuple[float, float, bool, int]:
    """Two-parameter logistic fit of y on a single predictor"""
    x = np.asarray(x, dtype=np.float64).ravel()
    y = check_binary_response(y)
    if x.shape != y.shape:
        raise InvalidArgument("x and y must have the same length")
    if np.ptp(x) == 0:
        raise DegenerateScale(0)
    fit = fit_marginal_batch(x[:, None], y, **kwargs)
    if not fit.converged[0]:
        logger.debug(f"Marginal logistic fit did not converge after {fit.iterations[0]} iterations")
    return float(fit.beta0[0]), float(fit.beta1[0]), bool(fit.converged[0]), int(fit.iterations[0])


def fit_logistic(
    x: np.ndarray,
    y: np.ndarray,
    ridge: float = 0.0,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
) -> LogisticFit:
    """Multivariate logistic regression by Newton-IRLS.

    ridge adds 0.5 * ridge * ||coef||^2 to the negative log-likelihood; the
    intercept is not penalized.
    """
    tol = settings.irls_tol if tol is None else tol
    max_iter = settings.irls_max_iter if max_iter is None else max_iter
    y = check_binary_response(y)
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    design = np.column_stack([np.ones(x.shape[0]), x])
    penalty = np.full(design.shape[1], float(ridge))
    penalty[0] = 0.0

    def objective(beta):
        return BINOMIAL.loglik(y, design @ beta) - 0.5 * float(np.sum(penalty * beta * beta))

    beta = np.zeros(design.shape[1])
    current = objective(beta)
    converged = False
    iteration = 0
    for iteration in range(1, max_iter + 1):
        eta = design @ beta
        grad = design.T @ (y - BINOMIAL.mean(eta)) - penalty * beta
        hessian = design.T @ (design * BINOMIAL.variance(eta)[:, None]) + np.diag(penalty)
        try:
            step = np.linalg.solve(hessian, grad)
        except np.linalg.LinAlgError as exc:
            raise FitFailure(f"Singular information matrix at iteration {iteration}") from exc

        t = 1.0
        trial = objective(beta + step)
        for _ in range(settings.glm_max_halvings):
            if trial >= current - 1e-12 * (1.0 + abs(current)):
                break
            t /= 2.0
            trial = objective(beta + t * step)
        beta = beta + t * step
        current = trial
        logger.debug(f"IRLS iteration {iteration}: loglik={current:.6f}")
        if np.max(np.abs(t * step)) <= tol:
            converged = True
            break

    return LogisticFit(intercept=float(beta[0]), coef=beta[1:], converged=converged, iterations=iteration)


def predict_logistic(fit: LogisticFit, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    return (fit.intercept + x @ fit.coef > 0).astype(np.int64)
