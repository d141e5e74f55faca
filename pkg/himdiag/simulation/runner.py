# himdiag/simulation/runner.py
"""Replication driver: generate, run a pipeline, score, aggregate.

Replication r draws everything from make_streams(spec.seed, r), so the
aggregated table is the same whichever executor ran the replications.
"""
import io
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Optional

import numpy as np
import pandas as pd

from himdiag.config import settings
from himdiag.downstream.lasso import lasso_path_cv
from himdiag.downstream.metrics import (
    eval_cp,
    eval_err,
    eval_fpr,
    eval_misclassification,
    eval_power_fdr,
)
from himdiag.downstream.schemas import EvaluationMetrics
from himdiag.downstream.screening import default_screening_size, sis_screen
from himdiag.glm.glm_him import glm_him_scores, rank_influential
from himdiag.glm.logistic import fit_logistic, predict_logistic
from himdiag.influence.inference import diagnose, remove_rows
from himdiag.influence.schemas import DataMatrix
from himdiag.simulation.generators import generate_instance
from himdiag.simulation.rng import draw_seed, make_streams
from himdiag.simulation.schemas import (
    AggregatedRow,
    GeneratedInstance,
    MetricRow,
    Pipeline,
    SimModel,
    SimulationSpec,
)
from himdiag.utils.errors import HimDiagError, InvalidArgument
from himdiag.utils.helpers import atomic_write_text, format_aligned
from himdiag.utils.logger import logger

TABLE_COLUMNS = ["model", "kappa", "s_set", "pipeline", "metric", "mean", "mc_se", "n_reps", "n_failures"]


def _flag_metrics(flagged, instance: GeneratedInstance, kappa: float) -> Dict[str, float]:
    power, fdr = eval_power_fdr(flagged, instance.true_influential)
    metrics = {"fdr": fdr, "n_flagged": len(flagged)}
    # nothing is influential at kappa = 0, so power is undefined there
    if kappa > 0:
        metrics["power"] = power
    return metrics


def _him_pipeline(instance, spec, cv_rng) -> EvaluationMetrics:
    report = diagnose(instance.data, alpha=spec.alpha, estimator=spec.estimator)
    return EvaluationMetrics(**_flag_metrics(report.flagged, instance, spec.kappa))


def _sis_pipeline(instance, spec, cv_rng) -> EvaluationMetrics:
    screened = sis_screen(instance.data, spec.d)
    return EvaluationMetrics(cp=eval_cp(screened.selected, instance.true_support))


def _sis_him_pipeline(instance, spec, cv_rng) -> EvaluationMetrics:
    report = diagnose(instance.data, alpha=spec.alpha, estimator=spec.estimator)
    reduced = remove_rows(instance.data, report.flagged)
    # screen the reduced data to the size chosen for the full data
    d = spec.d if spec.d is not None else default_screening_size(instance.data.n)
    screened = sis_screen(reduced, d)
    return EvaluationMetrics(
        cp=eval_cp(screened.selected, instance.true_support),
        **_flag_metrics(report.flagged, instance, spec.kappa),
    )


def _lasso_metrics(data: DataMatrix, instance: GeneratedInstance, cv_rng) -> Dict[str, float]:
    fit = lasso_path_cv(data, seed=draw_seed(cv_rng))
    return {
        "err": eval_err(fit.beta, instance.beta_true),
        "fpr": eval_fpr(fit.support, instance.true_support, data.p),
    }


def _lasso_pipeline(instance, spec, cv_rng) -> EvaluationMetrics:
    return EvaluationMetrics(**_lasso_metrics(instance.data, instance, cv_rng))


def _lasso_him_pipeline(instance, spec, cv_rng) -> EvaluationMetrics:
    report = diagnose(instance.data, alpha=spec.alpha, estimator=spec.estimator)
    reduced = remove_rows(instance.data, report.flagged)
    return EvaluationMetrics(
        **_lasso_metrics(reduced, instance, cv_rng),
        **_flag_metrics(report.flagged, instance, spec.kappa),
    )


def classifier_error(data: DataMatrix) -> float:
    """In-sample misclassification of a ridge logistic fit on the top-|rho| predictors"""
    columns = sis_screen(data, min(settings.classifier_size, data.p)).selected
    fit = fit_logistic(data.x[:, columns], data.y, ridge=settings.classifier_ridge)
    return eval_misclassification(data.y, predict_logistic(fit, data.x[:, columns]))


def _glm_him_pipeline(instance, spec, cv_rng) -> EvaluationMetrics:
    scores = glm_him_scores(instance.data)
    flagged = rank_influential(scores, spec.flag_count)
    reduced = remove_rows(instance.data, flagged)
    return EvaluationMetrics(
        e_full=classifier_error(instance.data),
        e_redu=classifier_error(reduced),
        **_flag_metrics(flagged, instance, spec.kappa),
    )


PIPELINES: Dict[Pipeline, Callable] = {
    Pipeline.HIM: _him_pipeline,
    Pipeline.SIS: _sis_pipeline,
    Pipeline.SIS_HIM: _sis_him_pipeline,
    Pipeline.LASSO: _lasso_pipeline,
    Pipeline.LASSO_HIM: _lasso_him_pipeline,
    Pipeline.GLM_HIM: _glm_him_pipeline,
}


def check_pipeline(spec: SimulationSpec, pipeline: Pipeline) -> Pipeline:
    pipeline = Pipeline(pipeline)
    logistic = spec.model == SimModel.LOGISTIC
    if logistic != (pipeline == Pipeline.GLM_HIM):
        raise InvalidArgument(f"Pipeline {pipeline.value} does not apply to model {spec.model.value}")
    return pipeline


def run_single(spec: SimulationSpec, pipeline: Pipeline, replication: int) -> List[MetricRow]:
    """Every kappa of the grid for one replication, sharing that replication's draws"""
    pipeline = check_pipeline(spec, pipeline)
    rows: List[MetricRow] = []
    for kappa in spec.kappa_grid:
        streams = make_streams(spec.seed, replication)
        setting = spec.model_copy(update={"kappa": kappa, "kappas": None})
        try:
            instance = generate_instance(setting, streams.generation)
            metrics = PIPELINES[pipeline](instance, setting, streams.cv)
        except HimDiagError as exc:
            logger.warning(f"Replication {replication} failed at kappa={kappa}: {exc}")
            rows.append(MetricRow(replication=replication, kappa=kappa, metric="failure", failed=True, error=str(exc)))
            continue
        rows.extend(
            MetricRow(replication=replication, kappa=kappa, metric=name, value=value)
            for name, value in metrics.as_dict().items()
        )
    return rows


def _run_celery(spec: SimulationSpec, pipeline: Pipeline) -> List[List[MetricRow]]:
    from celery import group

    from himdiag.tasks.simulation_tasks import run_replication_task

    spec_json = spec.model_dump_json()
    job = group(run_replication_task.s(spec_json, pipeline.value, r) for r in range(spec.replications))
    result = job.apply_async()
    # children in submission order, each collected on its own
    batches = [child.get(timeout=settings.simulation_task_timeout) for child in result.results]
    return [[MetricRow(**row) for row in batch] for batch in batches]


def run_replications(
    spec: SimulationSpec,
    pipeline: Pipeline,
    executor: Optional[str] = None,
    workers: Optional[int] = None,
) -> List[AggregatedRow]:
    pipeline = check_pipeline(spec, pipeline)
    executor = executor or settings.simulation_executor
    workers = workers or settings.simulation_workers
    logger.info(
        f"Running {spec.replications} replications of {pipeline.value} on {spec.model.value} "
        f"(kappa grid {spec.kappa_grid}, executor={executor})"
    )

    if executor == "serial":
        batches = [run_single(spec, pipeline, r) for r in range(spec.replications)]
    elif executor == "threads":
        with ThreadPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(lambda r: run_single(spec, pipeline, r), range(spec.replications)))
    elif executor == "celery":
        batches = _run_celery(spec, pipeline)
    else:
        raise InvalidArgument(f"Unknown executor: {executor}")

    table = aggregate([row for batch in batches for row in batch], spec, pipeline)
    logger.info(f"Finished {spec.replications} replications: {len(table)} aggregated rows")
    return table


def aggregate(rows: List[MetricRow], spec: SimulationSpec, pipeline: Pipeline) -> List[AggregatedRow]:
    """Mean and Monte Carlo standard error per (kappa, metric), in kappa-grid then first-seen metric order"""
    s_set = spec.s_set.value if spec.model in (SimModel.M2, SimModel.M3) else "-"
    table: List[AggregatedRow] = []
    for kappa in spec.kappa_grid:
        at_kappa = [row for row in rows if row.kappa == kappa]
        failures = len({row.replication for row in at_kappa if row.failed})
        if failures:
            logger.warning(f"{failures} of {spec.replications} replications failed at kappa={kappa}")
        metrics = list(dict.fromkeys(row.metric for row in at_kappa if not row.failed))
        for metric in metrics:
            values = np.array([row.value for row in at_kappa if row.metric == metric and not row.failed])
            mc_se = float(values.std(ddof=1) / np.sqrt(values.size)) if values.size > 1 else 0.0
            table.append(
                AggregatedRow(
                    model=spec.model.value,
                    kappa=kappa,
                    s_set=s_set,
                    pipeline=pipeline.value,
                    metric=metric,
                    mean=float(values.mean()),
                    mc_se=mc_se,
                    n_reps=int(values.size),
                    n_failures=failures,
                )
            )
        if failures and not metrics:
            table.append(
                AggregatedRow(
                    model=spec.model.value,
                    kappa=kappa,
                    s_set=s_set,
                    pipeline=pipeline.value,
                    metric="failure",
                    mean=float("nan"),
                    mc_se=float("nan"),
                    n_reps=0,
                    n_failures=failures,
                )
            )
    return table


def _frame(rows: List[AggregatedRow]) -> pd.DataFrame:
    return pd.DataFrame([row.model_dump() for row in rows], columns=TABLE_COLUMNS)


def format_table(rows: List[AggregatedRow]) -> str:
    cells = [
        [row.model, f"{row.kappa:g}", row.s_set, row.pipeline, row.metric, f"{row.mean:.4f}", f"{row.mc_se:.4f}", row.n_reps, row.n_failures]
        for row in rows
    ]
    return format_aligned(TABLE_COLUMNS, cells)


def table_to_csv(rows: List[AggregatedRow]) -> str:
    buffer = io.StringIO()
    _frame(rows).to_csv(buffer, index=False, lineterminator="\n")
    return buffer.getvalue()


def write_table_csv(rows: List[AggregatedRow], path: str) -> None:
    atomic_write_text(path, table_to_csv(rows))
