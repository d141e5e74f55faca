# himdiag/config.py
from typing import Literal
from pydantic_settings import BaseSettings
from dotenv import load_dotenv

load_dotenv()

class Settings(BaseSettings):
    # Logging
    log_level: str = "INFO"

    # Inference
    default_alpha: float = 0.05
    default_estimator: Literal["moment", "robust"] = "moment"
    robust_mad_constant: float = 1.4826  # normal-consistency factor for the MAD

    # HIM numerics
    loo_variance_rtol: float = 1e-12

    # LASSO
    lasso_n_lambda: int = 100
    lasso_min_ratio: float = 1e-3
    lasso_tol: float = 1e-7
    lasso_max_iter: int = 100_000  # coordinate sweeps
    cv_folds: int = 10

    # Marginal GLM fits
    irls_tol: float = 1e-8
    irls_max_iter: int = 50
    glm_divergence_cap: float = 10.0
    glm_gradient_tol: float = 1e-8
    glm_max_halvings: int = 30

    # Logistic classifier for misclassification rates
    classifier_size: int = 2
    classifier_ridge: float = 1.0

    # Simulation defaults
    default_replications: int = 200
    default_n: int = 100
    default_p: int = 1000
    default_n_infl: int = 10
    ar1_rho: float = 0.5
    leverage_shift: float = 30.0

    # Execution
    simulation_executor: Literal["serial", "threads", "celery"] = "serial"
    simulation_workers: int = 4

    # Celery Configuration
    celery_broker_url: str = "redis://localhost:6379/0"
    celery_result_backend: str = "redis://localhost:6379/0"
    celery_task_always_eager: bool = True  # Set to False when a worker is running
    simulation_task_timeout: int = 3600  # seconds
    simulation_queue: str = "simulation"

settings = Settings()
