# himdiag/glm/glm_him.py
"""GLM influence measure: mean squared change of the marginal (intercept, slope) fits.

D_k^glm = (1/p) * sum_j ||beta_j - beta_j^(k)||^2 with every marginal model
refit on the n-1 rows left after deleting row k. Pairs (k, j) whose full or
leave-one-out fit does not converge are left out of the mean and listed in
fit_failures. There is no reference distribution for D_k^glm, so flagging
takes the m largest scores.
"""
import numpy as np

from himdiag.glm.logistic import BINOMIAL, ExponentialFamily, check_binary_response, fit_marginal_batch
from himdiag.glm.schemas import GlmInfluenceScores
from himdiag.influence.schemas import DataMatrix
from himdiag.utils.errors import FitFailure, InvalidArgument
from himdiag.utils.logger import logger


def glm_him_scores(
    data: DataMatrix,
    warm_start: bool = True,
    family: ExponentialFamily = BINOMIAL,
) -> GlmInfluenceScores:
    y = check_binary_response(data.y)
    n, p = data.n, data.p

    full = fit_marginal_batch(data.x, y, family=family)
    if not full.converged.any():
        raise FitFailure("No marginal fit converged on the full data")
    if not full.converged.all():
        logger.warning(f"{int((~full.converged).sum())} of {p} full-data marginal fits did not converge")

    d = np.zeros(n)
    used = np.zeros(n, dtype=np.int64)
    failures = []
    for k in range(n):
        keep = np.arange(n) != k
        y_k = y[keep]
        valid = full.converged.copy()
        if y_k.min() == y_k.max():
            valid[:] = False
        else:
            loo = fit_marginal_batch(
                data.x[keep],
                y_k,
                beta0=full.beta0 if warm_start else None,
                beta1=full.beta1 if warm_start else None,
                family=family,
            )
            valid &= loo.converged
            shift = (full.beta0 - loo.beta0) ** 2 + (full.beta1 - loo.beta1) ** 2
            if valid.any():
                d[k] = float(np.mean(shift[valid]))
        used[k] = int(valid.sum())
        failures.extend((k, int(j)) for j in np.flatnonzero(~valid))

    if used.max() == 0:
        raise FitFailure("Every leave-one-out marginal fit failed")
    if failures:
        logger.warning(f"Excluded {len(failures)} non-converged (observation, predictor) pairs")
    return GlmInfluenceScores(d=d, fit_failures=failures, pairs_used=used)


def rank_influential(scores: GlmInfluenceScores, m: int) -> np.ndarray:
    """Indices of the m largest scores, ties to the lower index, returned sorted"""
    n = scores.n
    if not 1 <= int(m) <= n:
        raise InvalidArgument(f"m must lie in [1, {n}], got {m}")
    order = np.lexsort((np.arange(n), -scores.d))
    return np.sort(order[: int(m)])
