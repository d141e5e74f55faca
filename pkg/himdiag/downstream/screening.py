# himdiag/downstream/screening.py
import math
from typing import Optional

import numpy as np

from himdiag.downstream.schemas import ScreeningResult
from himdiag.influence.schemas import DataMatrix
from himdiag.influence.stats_core import marginal_correlations
from himdiag.utils.errors import InvalidArgument


def default_screening_size(n: int) -> int:
    """floor(n / log n), the customary SIS model size"""
    return max(1, int(math.floor(n / math.log(n))))


def sis_screen(data: DataMatrix, d: Optional[int] = None) -> ScreeningResult:
    """Keep the d predictors with the largest absolute marginal correlation"""
    d = default_screening_size(data.n) if d is None else int(d)
    if not 1 <= d <= data.p:
        raise InvalidArgument(f"Screening size must lie in [1, {data.p}], got {d}")
    abs_corr = np.abs(marginal_correlations(data).rho)
    order = np.lexsort((np.arange(data.p), -abs_corr))
    return ScreeningResult(selected=order[:d], abs_corr=abs_corr)
