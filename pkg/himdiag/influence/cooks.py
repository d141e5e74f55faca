# himdiag/influence/cooks.py
"""Classical Cook's distance for n > p + 1.

Both the case-deletion form and the residual/leverage form divide by
(p + 1) * sigma2, counting the intercept as a fitted parameter, so the two
agree to round-off.
"""
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import solve_triangular

from himdiag.influence.schemas import DataMatrix
from himdiag.utils.errors import DegenerateFit, DimensionError, ExactLeverage, SingularDesign

_EPS = np.finfo(np.float64).eps


@dataclass(frozen=True)
class OlsFit:
    beta: np.ndarray  # intercept first
    residuals: np.ndarray  # fitted minus observed
    hat_diag: np.ndarray
    sigma2: float
    n: int
    p: int


def design_matrix(x: np.ndarray) -> np.ndarray:
    return np.column_stack([np.ones(x.shape[0]), x])


def _least_squares(design: np.ndarray, y: np.ndarray, k: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Coefficients and the orthonormal factor Q of a rank-checked QR solve"""
    q, r = np.linalg.qr(design, mode="reduced")
    diag = np.abs(np.diag(r))
    if diag.size == 0 or diag.min() <= max(design.shape) * _EPS * diag.max():
        raise SingularDesign(k)
    beta = solve_triangular(r, q.T @ y)
    return beta, q


def ols_fit(data: DataMatrix) -> OlsFit:
    n, p = data.n, data.p
    if n <= p + 1:
        raise DimensionError(f"Ordinary least squares needs n > p + 1, got n = {n}, p = {p}")
    design = design_matrix(data.x)
    beta, q = _least_squares(design, data.y)
    residuals = design @ beta - data.y
    rss = float(residuals @ residuals)
    # an exact fit is reported as exact rather than as round-off
    if rss <= (n * _EPS) ** 2 * float(data.y @ data.y):
        residuals = np.zeros(n)
        rss = 0.0
    return OlsFit(
        beta=beta,
        residuals=residuals,
        hat_diag=np.sum(q * q, axis=1),
        sigma2=rss / (n - p - 1),
        n=n,
        p=p,
    )


def cooks_distance_hat(fit: OlsFit) -> np.ndarray:
    """D_k = e_k^2 / ((p+1) sigma2) * h_kk / (1 - h_kk)^2"""
    if fit.sigma2 <= 0:
        raise DegenerateFit("Residual variance is zero; Cook's distance is undefined")
    exact = np.flatnonzero(1.0 - fit.hat_diag <= 1e-12)
    if exact.size:
        raise ExactLeverage(int(exact[0]))
    h = fit.hat_diag
    return fit.residuals ** 2 / ((fit.p + 1) * fit.sigma2) * h / (1.0 - h) ** 2


def cooks_distance_deletion(data: DataMatrix) -> np.ndarray:
    """Cook's distance by refitting without each observation in turn"""
    fit = ols_fit(data)
    if fit.sigma2 <= 0:
        raise DegenerateFit("Residual variance is zero; Cook's distance is undefined")
    design = design_matrix(data.x)
    distances = np.empty(data.n)
    for k in range(data.n):
        keep = np.arange(data.n) != k
        beta_k, _ = _least_squares(design[keep], data.y[keep], k=k)
        shift = design @ (beta_k - fit.beta)
        distances[k] = float(shift @ shift) / ((data.p + 1) * fit.sigma2)
    return distances


def cooks_distance(data: DataMatrix) -> Tuple[OlsFit, np.ndarray]:
    fit = ols_fit(data)
    return fit, cooks_distance_hat(fit)
