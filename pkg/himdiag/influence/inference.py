# himdiag/influence/inference.py
"""p-values, Benjamini-Hochberg flagging and the diagnosis pipeline"""
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, Optional

import numpy as np

from himdiag import __version__
from himdiag.config import settings
from himdiag.influence.him import him_scores
from himdiag.influence.schemas import DataMatrix, Estimator, InfluenceScores
from himdiag.influence.stats_core import chisq1_sf
from himdiag.utils.errors import InsufficientData, InvalidArgument
from himdiag.utils.logger import logger


@dataclass(frozen=True)
class DiagnosisReport:
    scores: InfluenceScores
    pvalues: np.ndarray
    alpha: float
    flagged: np.ndarray
    estimator: Estimator
    label: str = "data"
    row_index: Optional[np.ndarray] = None
    params: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready payload with keys meta, scores, statistics, pvalues, flagged, params"""
        row_index = self.row_index if self.row_index is not None else np.arange(self.scores.n)
        return {
            "meta": {
                "label": self.label,
                "method": "him",
                "version": __version__,
                "n": self.scores.n,
                "p": self.scores.p,
                "estimator": self.estimator.value,
                "sd_divisor": "n-1",
                "correlation_divisor": "n",
                "n_flagged": int(self.flagged.size),
                "flagged_rows": [int(row_index[i]) for i in self.flagged],
            },
            "scores": [float(v) for v in self.scores.d],
            "statistics": [float(v) for v in self.scores.stat],
            "pvalues": [float(v) for v in self.pvalues],
            "flagged": [int(i) for i in self.flagged],
            "params": {"alpha": self.alpha, "estimator": self.estimator.value, **self.params},
        }


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise InvalidArgument(f"alpha must lie strictly between 0 and 1, got {alpha}")
    return alpha


def pvalues(scores: InfluenceScores) -> np.ndarray:
    return np.atleast_1d(chisq1_sf(scores.stat))


def bh_select(pvalues: np.ndarray, alpha: float) -> np.ndarray:
    """Benjamini-Hochberg step-up rejection set, as sorted original indices"""
    alpha = _check_alpha(alpha)
    p = np.asarray(pvalues, dtype=np.float64)
    if p.size == 0:
        return np.array([], dtype=np.int64)
    if np.any(~np.isfinite(p)) or np.any(p < 0) or np.any(p > 1):
        raise InvalidArgument("p-values must lie in [0, 1]")

    n = p.size
    order = np.argsort(p, kind="stable")
    ranks = np.arange(1, n + 1)
    # relative slack absorbs rounding in alpha * i / n
    passing = np.flatnonzero(p[order] * n <= alpha * ranks * (1.0 + 1e-12))
    if passing.size == 0:
        return np.array([], dtype=np.int64)
    cutoff = p[order[passing[-1]]]
    return np.flatnonzero(p <= cutoff)


def diagnose(
    data: DataMatrix,
    alpha: Optional[float] = None,
    estimator: Optional[Estimator] = None,
    label: str = "data",
) -> DiagnosisReport:
    alpha = _check_alpha(settings.default_alpha if alpha is None else alpha)
    estimator = Estimator(estimator or settings.default_estimator)

    scores = him_scores(data, estimator)
    pv = pvalues(scores)
    flagged = bh_select(pv, alpha)
    logger.info(f"Diagnosed {label}: n={data.n}, p={data.p}, flagged {flagged.size} at alpha={alpha}")
    return DiagnosisReport(
        scores=scores,
        pvalues=pv,
        alpha=alpha,
        flagged=flagged,
        estimator=estimator,
        label=label,
        row_index=data.row_index,
    )


def remove_rows(data: DataMatrix, flagged: Iterable[int]) -> DataMatrix:
    """Drop flagged rows, keeping survivors in order and recording what was removed"""
    flagged = sorted({int(i) for i in flagged})
    if any(i < 0 or i >= data.n for i in flagged):
        raise InvalidArgument(f"Flagged indices must lie in [0, {data.n})")
    if not flagged:
        return data
    if data.n - len(flagged) < 3:
        raise InsufficientData(f"Removing {len(flagged)} of {data.n} rows leaves fewer than 3")
    keep = np.setdiff1d(np.arange(data.n), flagged)
    return data.take_rows(keep)
