# himdiag/influence/him.py
"""High-dimensional influence measure.

D_k = (1/p) * sum_j (rho_j - rho_j^(k))^2, where rho_j^(k) is the marginal
correlation recomputed with observation k deleted. The statistic n^2 * D_k is
calibrated against chi-square(1).
"""
import numpy as np

from himdiag.config import settings
from himdiag.influence.schemas import BDecomposition, CorrelationVector, DataMatrix, Estimator, InfluenceScores
from himdiag.influence.stats_core import correlations_from_arrays, location_scale, summarize
from himdiag.utils.errors import DegenerateScale, InvalidArgument
from himdiag.utils.logger import logger


def _check_index(k: int, n: int) -> int:
    if not 0 <= int(k) < n:
        raise InvalidArgument(f"Observation index {k} out of range for n = {n}")
    return int(k)


def loo_correlation(data: DataMatrix, k: int, estimator: Estimator = Estimator.MOMENT) -> CorrelationVector:
    """Marginal correlations on the n-1 rows left after deleting row k"""
    k = _check_index(k, data.n)
    x = np.delete(data.x, k, axis=0)
    y = np.delete(data.y, k)
    mu_x, sigma_x = location_scale(x, estimator, k=k)
    mu_y, sigma_y = location_scale(y, estimator, k=k)
    cross = (x - mu_x).T @ (y - mu_y)
    return CorrelationVector(rho=cross / (x.shape[0] * sigma_x * sigma_y))


def him_scores_naive(data: DataMatrix, estimator: Estimator = Estimator.MOMENT) -> InfluenceScores:
    """Reference O(n^2 p) implementation: one full recomputation per deleted row"""
    rho = correlations_from_arrays(data.x, data.y, summarize(data, estimator))
    d = np.empty(data.n)
    for k in range(data.n):
        rho_k = loo_correlation(data, k, estimator).rho
        d[k] = np.mean((rho - rho_k) ** 2)
    return InfluenceScores.from_scores(d, estimator, data.p)


def him_scores(data: DataMatrix, estimator: Estimator = Estimator.MOMENT) -> InfluenceScores:
    """HIM scores in O(np) from full-sample sufficient statistics.

    With centered columns xc and yc, deleting row k leaves a centered sum of
    squares Sxx - xc_k^2 * n / (n-1), and likewise for the cross moment, so
    every leave-one-out correlation is an O(1) update. The robust estimator
    has no such update and falls back to the naive path.
    """
    if Estimator(estimator) is Estimator.ROBUST:
        logger.debug("Robust estimator requested; using leave-one-out recomputation")
        return him_scores_naive(data, estimator)

    n, p = data.n, data.p
    m = n - 1
    xc = (data.x - data.x.mean(axis=0)).astype(np.longdouble)
    yc = (data.y - data.y.mean()).astype(np.longdouble)

    sxx = np.sum(xc * xc, axis=0)
    syy = np.sum(yc * yc)
    sxy = xc.T @ yc

    shrink = np.longdouble(n) / np.longdouble(m)
    sxx_k = sxx[None, :] - xc * xc * shrink
    syy_k = syy - yc * yc * shrink
    sxy_k = sxy[None, :] - xc * yc[:, None] * shrink

    rtol = settings.loo_variance_rtol
    bad_y = np.flatnonzero(syy_k <= rtol * syy)
    bad_x = np.argwhere(sxx_k <= rtol * sxx[None, :])
    if bad_y.size or bad_x.size:
        k_y = int(bad_y[0]) if bad_y.size else n
        k_x = int(bad_x[0, 0]) if bad_x.size else n
        if k_x <= k_y:
            raise DegenerateScale(int(bad_x[0, 1]), k_x)
        raise DegenerateScale(None, k_y)

    rho = sxy * (n - 1) / (n * np.sqrt(sxx * syy))
    rho_k = sxy_k * (m - 1) / (m * np.sqrt(sxx_k * syy_k[:, None]))
    d = np.mean((rho[None, :] - rho_k) ** 2, axis=1)
    return InfluenceScores.from_scores(d.astype(np.float64), estimator, p)


def known_moment_scores(z: DataMatrix) -> np.ndarray:
    """D_k under the known-moment convention rho_j = n^-1 sum_i X_ij Y_i.

    The data are used as given, without re-centering or re-scaling.
    """
    n = z.n
    a = z.x * z.y[:, None]
    total = a.sum(axis=0)
    rho = total / n
    rho_k = (total[None, :] - a) / (n - 1)
    return np.mean((rho[None, :] - rho_k) ** 2, axis=1)


def b_decomposition(z: DataMatrix, k: int) -> BDecomposition:
    """Split the known-moment D_k into B1 + B2 + B3 - 2*B4.

    K[t, s] = sum_j X_tj X_sj / p is the row Gram matrix.
    """
    n, p = z.n, z.p
    k = _check_index(k, n)
    x, y = z.x, z.y
    gram = (x @ x.T) / p
    diag = np.diag(gram)
    c2 = 1.0 / (n * (n - 1)) ** 2

    b1 = c2 * float(np.sum(y * y * diag))
    b2 = (n - 2) / (n * (n - 1) ** 2) * y[k] ** 2 * diag[k]
    b3 = c2 * float(y @ gram @ y - np.sum(y * y * diag))
    b4 = y[k] * float(gram[k] @ y - y[k] * diag[k]) / (n * (n - 1) ** 2)
    return BDecomposition(b1=b1, b2=float(b2), b3=b3, b4=float(b4), k=k)

