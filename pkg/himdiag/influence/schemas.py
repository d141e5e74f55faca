# himdiag/influence/schemas.py
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from himdiag.utils.errors import DegenerateScale, DimensionError, InsufficientData, InvalidArgument


class Estimator(str, Enum):
    MOMENT = "moment"
    ROBUST = "robust"


@dataclass(frozen=True)
class DataMatrix:
    """n x p predictors plus a length-n response.

    row_index keeps the original row number of every retained observation so
    reports stay in the caller's numbering after rows are removed.
    """
    x: np.ndarray
    y: np.ndarray
    column_names: Optional[Tuple[str, ...]] = None
    row_index: Optional[np.ndarray] = None
    removed: Tuple[int, ...] = ()
    require_variance: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.float64)
        if x.ndim == 1:
            x = x.reshape(-1, 1)
        if x.ndim != 2 or y.ndim != 1:
            raise DimensionError("x must be a matrix and y a vector")
        if x.shape[0] != y.shape[0]:
            raise DimensionError(f"x has {x.shape[0]} rows but y has length {y.shape[0]}")
        if x.shape[0] < 3:
            raise InsufficientData(f"At least 3 observations are required, got {x.shape[0]}")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise InvalidArgument("Data contains NaN or infinite entries")
        if self.column_names is not None and len(self.column_names) != x.shape[1]:
            raise DimensionError("column_names must have one label per predictor")
        row_index = np.arange(x.shape[0]) if self.row_index is None else np.asarray(self.row_index, dtype=np.int64)
        if row_index.shape != (x.shape[0],):
            raise DimensionError("row_index must have one entry per observation")

        if self.require_variance:
            constant = np.flatnonzero(np.ptp(x, axis=0) == 0)
            if constant.size:
                raise DegenerateScale(int(constant[0]))
            if np.ptp(y) == 0:
                raise DegenerateScale(None)

        # frozen dataclass: normalise the stored arrays in place
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "row_index", row_index)
        if self.column_names is not None:
            object.__setattr__(self, "column_names", tuple(self.column_names))

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def p(self) -> int:
        return self.x.shape[1]

    def take_rows(self, keep: np.ndarray) -> "DataMatrix":
        """Subset of rows in the given order, carrying provenance along"""
        keep = np.asarray(keep, dtype=np.int64)
        dropped = sorted(set(range(self.n)) - set(keep.tolist()))
        return DataMatrix(
            x=self.x[keep],
            y=self.y[keep],
            column_names=self.column_names,
            row_index=self.row_index[keep],
            removed=tuple(sorted(set(self.removed) | {int(self.row_index[i]) for i in dropped})),
            require_variance=self.require_variance,
        )


@dataclass(frozen=True)
class StandardizationSummary:
    mu_x: np.ndarray
    sigma_x: np.ndarray
    mu_y: float
    sigma_y: float
    estimator: Estimator


@dataclass(frozen=True)
class CorrelationVector:
    rho: np.ndarray

    def __len__(self) -> int:
        return self.rho.shape[0]


@dataclass(frozen=True)
class InfluenceScores:
    """HIM scores d[k] and the calibrated statistic n^2 d[k]"""
    d: np.ndarray
    stat: np.ndarray
    estimator: Estimator
    n: int
    p: int

    @classmethod
    def from_scores(cls, d: np.ndarray, estimator: Estimator, p: int) -> "InfluenceScores":
        d = np.asarray(d, dtype=np.float64)
        n = d.shape[0]
        return cls(d=d, stat=(n * n) * d, estimator=Estimator(estimator), n=n, p=p)


@dataclass(frozen=True)
class BDecomposition:
    b1: float
    b2: float
    b3: float
    b4: float
    k: int

    @property
    def total(self) -> float:
        return self.b1 + self.b2 + self.b3 - 2.0 * self.b4
