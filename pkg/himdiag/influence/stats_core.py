# himdiag/influence/stats_core.py
"""Column statistics, standardization, marginal correlations and the chi-square(1) tail.

Correlations follow the n-denominator convention

    rho_j = sum_i (X_ij - mu_xj)(Y_i - mu_y) / (n * sigma_xj * sigma_y)

with sigma estimated by the (n-1)-divisor standard deviation, so under the
moment estimator |rho_j| <= (n-1)/n rather than 1.
"""
from typing import Optional, Tuple, Union

import numpy as np
from scipy.special import erfc

from himdiag.config import settings
from himdiag.influence.schemas import CorrelationVector, DataMatrix, Estimator, StandardizationSummary
from himdiag.utils.errors import DegenerateScale, InsufficientData, InvalidArgument


def column_moments(v: np.ndarray) -> Tuple[float, float]:
    """Mean and (n-1)-divisor standard deviation of a vector"""
    v = np.asarray(v, dtype=np.float64)
    if v.size < 2:
        raise InsufficientData("At least 2 values are required for a standard deviation")
    mean = float(np.mean(v))
    sd = float(np.sqrt(np.sum((v - mean) ** 2) / (v.size - 1)))
    return mean, sd


def robust_location_scale(v: np.ndarray) -> Tuple[float, float]:
    """Median and normal-consistent median absolute deviation"""
    v = np.asarray(v, dtype=np.float64)
    if v.size < 2:
        raise InsufficientData("At least 2 values are required for a robust scale")
    median = float(np.median(v))
    scale = settings.robust_mad_constant * float(np.median(np.abs(v - median)))
    if scale <= 0:
        raise DegenerateScale(message="Median absolute deviation is zero")
    return median, scale


def location_scale(a: np.ndarray, estimator: Estimator, k: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Column-wise location and scale of a 1-D or 2-D array.

    Raises DegenerateScale naming the first offending column (None for a
    vector), tagged with the deleted observation k when given.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.shape[0] < 2:
        raise InsufficientData("At least 2 observations are required")
    if Estimator(estimator) is Estimator.MOMENT:
        loc = np.mean(a, axis=0)
        scale = np.sqrt(np.sum((a - loc) ** 2, axis=0) / (a.shape[0] - 1))
        degenerate = np.ptp(a, axis=0) == 0
    else:
        loc = np.median(a, axis=0)
        scale = settings.robust_mad_constant * np.median(np.abs(a - loc), axis=0)
        degenerate = scale <= 0

    if np.any(degenerate):
        column = None if a.ndim == 1 else int(np.flatnonzero(degenerate)[0])
        raise DegenerateScale(column, k)
    return loc, scale


def summarize(data: DataMatrix, estimator: Estimator = Estimator.MOMENT) -> StandardizationSummary:
    mu_x, sigma_x = location_scale(data.x, estimator)
    mu_y, sigma_y = location_scale(data.y, estimator)
    return StandardizationSummary(
        mu_x=mu_x, sigma_x=sigma_x, mu_y=float(mu_y), sigma_y=float(sigma_y), estimator=Estimator(estimator)
    )


def standardize(data: DataMatrix, estimator: Estimator = Estimator.MOMENT) -> Tuple[StandardizationSummary, DataMatrix]:
    """Center and scale every column and the response with the chosen estimator"""
    summary = summarize(data, estimator)
    standardized = DataMatrix(
        x=(data.x - summary.mu_x) / summary.sigma_x,
        y=(data.y - summary.mu_y) / summary.sigma_y,
        column_names=data.column_names,
        row_index=data.row_index,
        removed=data.removed,
    )
    return summary, standardized


def correlations_from_arrays(x: np.ndarray, y: np.ndarray, summary: StandardizationSummary) -> np.ndarray:
    n = x.shape[0]
    cross = (x - summary.mu_x).T @ (y - summary.mu_y)
    return cross / (n * summary.sigma_x * summary.sigma_y)


def marginal_correlations(data: DataMatrix, summary: Optional[StandardizationSummary] = None) -> CorrelationVector:
    if summary is None:
        summary = summarize(data)
    return CorrelationVector(rho=correlations_from_arrays(data.x, data.y, summary))


def chisq1_sf(t: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """Upper tail P(chi2(1) > t) = erfc(sqrt(t / 2))"""
    values = np.asarray(t, dtype=np.float64)
    if not np.all(np.isfinite(values)) or np.any(values < 0):
        raise InvalidArgument("chi-square statistic must be finite and nonnegative")
    p = erfc(np.sqrt(values / 2.0))
    if p.ndim == 0:
        return float(p)
    return p
