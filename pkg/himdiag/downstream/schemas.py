# himdiag/downstream/schemas.py
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np
from pydantic import BaseModel, Field


@dataclass(frozen=True)
class ScreeningResult:
    """SIS output; selected is in rank order, largest |rho| first"""
    selected: np.ndarray
    abs_corr: np.ndarray


@dataclass(frozen=True)
class LassoFit:
    """Coefficients on the original predictor scale; the penalty acts on standardized ones"""
    beta: np.ndarray
    intercept: float
    lam: float
    lambda_path: np.ndarray
    cv_errors: np.ndarray
    folds: int
    seed: Optional[int]
    sweeps: int = 0

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.beta != 0)


class EvaluationMetrics(BaseModel):
    """Per-replication metrics; fields a pipeline does not produce stay None"""
    err: Optional[float] = Field(default=None, ge=0)
    fpr: Optional[float] = Field(default=None, ge=0, le=1)
    cp: Optional[float] = Field(default=None, ge=0, le=1)
    power: Optional[float] = Field(default=None, ge=0, le=1)
    fdr: Optional[float] = Field(default=None, ge=0, le=1)
    n_flagged: Optional[int] = Field(default=None, ge=0)
    e_full: Optional[float] = Field(default=None, ge=0, le=1)
    e_redu: Optional[float] = Field(default=None, ge=0, le=1)

    def as_dict(self) -> Dict[str, float]:
        return {name: float(value) for name, value in self.model_dump().items() if value is not None}
