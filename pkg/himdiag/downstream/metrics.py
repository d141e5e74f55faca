# himdiag/downstream/metrics.py
from typing import Iterable, Tuple

import numpy as np

from himdiag.utils.errors import InvalidArgument


def eval_err(beta_hat: np.ndarray, beta_true: np.ndarray) -> float:
    """Euclidean estimation error; intercepts are not part of either vector"""
    beta_hat = np.asarray(beta_hat, dtype=np.float64)
    beta_true = np.asarray(beta_true, dtype=np.float64)
    if beta_hat.shape != beta_true.shape:
        raise InvalidArgument("Coefficient vectors must have equal length")
    return float(np.linalg.norm(beta_hat - beta_true))


def eval_fpr(selected: Iterable[int], true_support: Iterable[int], p: int) -> float:
    """False positives over true negatives"""
    selected, truth = set(map(int, selected)), set(map(int, true_support))
    negatives = p - len(truth)
    if negatives <= 0:
        raise InvalidArgument("True support leaves no negatives")
    return len(selected - truth) / negatives


def eval_cp(selected: Iterable[int], true_support: Iterable[int]) -> int:
    return int(set(map(int, true_support)) <= set(map(int, selected)))


def eval_power_fdr(flagged: Iterable[int], true_influential: Iterable[int]) -> Tuple[float, float]:
    """(n_tp / n_infl, n_fp / r) with FDR taken as 0 when nothing is flagged"""
    flagged, truth = set(map(int, flagged)), set(map(int, true_influential))
    if not truth:
        raise InvalidArgument("Power needs at least one truly influential observation")
    power = len(flagged & truth) / len(truth)
    fdr = len(flagged - truth) / len(flagged) if flagged else 0.0
    return power, fdr


def eval_misclassification(y: np.ndarray, predicted: np.ndarray) -> float:
    y = np.asarray(y)
    predicted = np.asarray(predicted)
    if y.shape != predicted.shape:
        raise InvalidArgument("Labels and predictions must have equal length")
    return float(np.mean(y != predicted))
