# himdiag/glm/schemas.py
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np


@dataclass(frozen=True)
class MarginalGlmFit:
    """One two-parameter fit (intercept, slope) per predictor"""
    beta0: np.ndarray
    beta1: np.ndarray
    converged: np.ndarray
    iterations: np.ndarray


@dataclass(frozen=True)
class GlmInfluenceScores:
    d: np.ndarray
    fit_failures: List[Tuple[int, int]] = field(default_factory=list)
    pairs_used: Optional[np.ndarray] = None  # valid predictors per observation

    @property
    def n(self) -> int:
        return self.d.shape[0]


@dataclass(frozen=True)
class LogisticFit:
    intercept: float
    coef: np.ndarray
    converged: bool
    iterations: int
