# himdiag/simulation/generators.py
"""Seeded data generators for the perturbation models.

Every generator draws, in this order: the n x p AR(1) predictor matrix, then
the n noise terms (uniforms for the logistic model). The number of draws does
not depend on kappa, so regenerating from a restarted stream gives common
random numbers across a kappa grid.
"""
import numpy as np
from scipy.special import expit

from himdiag.config import settings
from himdiag.influence.schemas import DataMatrix
from himdiag.simulation.schemas import GeneratedInstance, SimModel, SimulationSpec, SSet
from himdiag.utils.errors import InvalidArgument

TRUE_SUPPORT = (0, 1, 4)
TRUE_COEFFICIENTS = (3.0, 1.5, 2.0)
LOGISTIC_INTERCEPT = 2.0


def _check_rho(rho: float) -> None:
    if not -1.0 < rho < 1.0:
        raise InvalidArgument(f"AR(1) coefficient must lie in (-1, 1), got {rho}")


def sample_ar1_row(p: int, rho: float, rng: np.random.Generator) -> np.ndarray:
    """One N(0, Sigma) draw with Sigma_jj' = rho^|j - j'|"""
    return sample_ar1(1, p, rho, rng)[0]


def sample_ar1(n: int, p: int, rho: float, rng: np.random.Generator) -> np.ndarray:
    """n independent AR(1) rows via X_j = rho X_{j-1} + sqrt(1 - rho^2) Z_j"""
    _check_rho(rho)
    z = rng.standard_normal((n, p))
    innovation = np.sqrt(1.0 - rho * rho)
    x = np.empty_like(z)
    x[:, 0] = z[:, 0]
    for j in range(1, p):
        x[:, j] = rho * x[:, j - 1] + innovation * z[:, j]
    return x


def linear_beta(p: int) -> np.ndarray:
    beta = np.zeros(p)
    beta[list(TRUE_SUPPORT)] = TRUE_COEFFICIENTS
    return beta


def perturbation_direction(p: int) -> np.ndarray:
    """gamma: ones off the true support"""
    gamma = np.ones(p)
    gamma[list(TRUE_SUPPORT)] = 0.0
    return gamma


def shift_columns(s_set: SSet, p: int) -> np.ndarray:
    """Zero-based S1 = 0..99, S2 = p-101..p-1, S3 = all columns; clipped to p"""
    if s_set == SSet.S1:
        return np.arange(min(100, p))
    if s_set == SSet.S2:
        return np.arange(max(0, p - 101), p)
    return np.arange(p)


def _check_model(spec: SimulationSpec, expected: SimModel) -> None:
    if spec.model != expected:
        raise InvalidArgument(f"Generator for {expected.value} called with model {spec.model.value}")


def _instance(spec, x, y, beta_true, **meta) -> GeneratedInstance:
    return GeneratedInstance(
        data=DataMatrix(x=x, y=y),
        beta_true=beta_true,
        true_influential=np.arange(spec.n_infl),
        truth_meta={"model": spec.model.value, "kappa": spec.kappa, **meta},
    )


def gen_model1(spec: SimulationSpec, rng: np.random.Generator) -> GeneratedInstance:
    """Response perturbation: contaminated rows get kappa * X_i'gamma added"""
    _check_model(spec, SimModel.M1)
    x = sample_ar1(spec.n, spec.p, settings.ar1_rho, rng)
    eps = rng.standard_normal(spec.n)
    beta = linear_beta(spec.p)
    y = x @ beta + eps
    rows = slice(0, spec.n_infl)
    y[rows] += spec.kappa * (x[rows] @ perturbation_direction(spec.p))
    return _instance(spec, x, y, beta)


def gen_model2(spec: SimulationSpec, rng: np.random.Generator) -> GeneratedInstance:
    """Predictor perturbation: contaminated rows shifted by 30 kappa on S, response left clean"""
    _check_model(spec, SimModel.M2)
    x = sample_ar1(spec.n, spec.p, settings.ar1_rho, rng)
    eps = rng.standard_normal(spec.n)
    beta = linear_beta(spec.p)
    y = x @ beta + eps
    columns = shift_columns(spec.s_set, spec.p)
    x[np.ix_(np.arange(spec.n_infl), columns)] += settings.leverage_shift * spec.kappa
    return _instance(spec, x, y, beta, s_set=spec.s_set.value)


def gen_model3(spec: SimulationSpec, rng: np.random.Generator) -> GeneratedInstance:
    """Both: shifted predictors on S and perturbed coefficients beta + kappa * gamma"""
    _check_model(spec, SimModel.M3)
    x = sample_ar1(spec.n, spec.p, settings.ar1_rho, rng)
    eps = rng.standard_normal(spec.n)
    beta = linear_beta(spec.p)
    y = x @ beta + eps
    rows = np.arange(spec.n_infl)
    columns = shift_columns(spec.s_set, spec.p)
    x[np.ix_(rows, columns)] += settings.leverage_shift * spec.kappa
    beta_perturbed = beta + spec.kappa * perturbation_direction(spec.p)
    y[rows] = x[rows] @ beta_perturbed + eps[rows]
    return _instance(spec, x, y, beta, s_set=spec.s_set.value)


def logistic_betas(p: int, kappa: float):
    """(beta_true, beta_infl); beta_infl replaces the last p/2 entries with -kappa"""
    beta = np.zeros(p)
    beta[:2] = 5.0
    beta_infl = beta.copy()
    beta_infl[p - p // 2:] = -kappa
    return beta, beta_infl


def gen_logistic(spec: SimulationSpec, rng: np.random.Generator) -> GeneratedInstance:
    _check_model(spec, SimModel.LOGISTIC)
    x = sample_ar1(spec.n, spec.p, settings.ar1_rho, rng)
    u = rng.random(spec.n)
    beta, beta_infl = logistic_betas(spec.p, spec.kappa)
    eta = LOGISTIC_INTERCEPT + x @ beta
    rows = slice(0, spec.n_infl)
    eta[rows] = LOGISTIC_INTERCEPT + x[rows] @ beta_infl
    y = (u < expit(eta)).astype(np.float64)
    return _instance(spec, x, y, beta)


GENERATORS = {
    SimModel.M1: gen_model1,
    SimModel.M2: gen_model2,
    SimModel.M3: gen_model3,
    SimModel.LOGISTIC: gen_logistic,
}


def generate_instance(spec: SimulationSpec, rng: np.random.Generator) -> GeneratedInstance:
    return GENERATORS[spec.model](spec, rng)
