# himdiag/simulation/schemas.py
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from himdiag.config import settings
from himdiag.influence.schemas import DataMatrix, Estimator


class SimModel(str, Enum):
    M1 = "m1"
    M2 = "m2"
    M3 = "m3"
    LOGISTIC = "logistic"


class SSet(str, Enum):
    S1 = "s1"
    S2 = "s2"
    S3 = "s3"


class Pipeline(str, Enum):
    HIM = "him"
    SIS = "sis"
    SIS_HIM = "sis+him"
    LASSO = "lasso"
    LASSO_HIM = "lasso+him"
    GLM_HIM = "glm-him"


class SimulationSpec(BaseModel):
    """One simulation setting; `kappas` overrides `kappa` when given"""
    model: SimModel = SimModel.M1
    n: int = Field(default=settings.default_n, ge=3)
    p: int = Field(default=settings.default_p, ge=1)
    n_infl: int = Field(default=settings.default_n_infl, ge=1)
    kappa: float = Field(default=0.0, ge=0)
    kappas: Optional[List[float]] = None
    s_set: SSet = SSet.S1
    alpha: float = Field(default=settings.default_alpha, gt=0, lt=1)
    estimator: Estimator = Estimator(settings.default_estimator)
    seed: int = 0
    replications: int = Field(default=settings.default_replications, ge=1)
    d: Optional[int] = Field(default=None, ge=1)
    m: Optional[int] = Field(default=None, ge=1)

    @field_validator("kappas")
    @classmethod
    def validate_kappas(cls, v):
        if v is not None:
            if not v:
                raise ValueError("kappas must not be empty")
            if any(k < 0 for k in v):
                raise ValueError("kappa values must be nonnegative")
        return v

    @model_validator(mode="after")
    def validate_dimensions(self):
        if self.n_infl >= self.n:
            raise ValueError("n_infl must be smaller than n")
        if self.model in (SimModel.M1, SimModel.M3) and self.p < 5:
            raise ValueError("Models 1 and 3 need p >= 5 for the true support {0, 1, 4}")
        if self.model == SimModel.LOGISTIC and (self.p < 2 or self.p % 2):
            raise ValueError("The logistic model needs an even p >= 2")
        return self

    @property
    def kappa_grid(self) -> List[float]:
        return list(self.kappas) if self.kappas is not None else [self.kappa]

    @property
    def flag_count(self) -> int:
        """Observations flagged by GLM-HIM ranking"""
        return self.m if self.m is not None else self.n_infl


@dataclass
class GeneratedInstance:
    data: DataMatrix
    beta_true: np.ndarray
    true_influential: np.ndarray
    truth_meta: Dict[str, Any] = field(default_factory=dict)

    @property
    def true_support(self) -> np.ndarray:
        return np.flatnonzero(self.beta_true)


class MetricRow(BaseModel):
    """One metric from one replication at one kappa; failed rows carry no value"""
    replication: int
    kappa: float
    metric: str
    value: Optional[float] = None
    failed: bool = False
    error: Optional[str] = None


class AggregatedRow(BaseModel):
    model: str
    kappa: float
    s_set: str
    pipeline: str
    metric: str
    mean: float
    mc_se: float
    n_reps: int
    n_failures: int
