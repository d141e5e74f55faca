# himdiag/cli/commands.py
from typing import List, Literal, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, ValidationError, model_validator

from himdiag.cli.io import dump_frame, dump_json, read_csv
from himdiag.config import settings
from himdiag.glm.glm_him import glm_him_scores, rank_influential
from himdiag.influence.cooks import cooks_distance
from himdiag.influence.inference import diagnose
from himdiag.influence.schemas import Estimator
from himdiag.simulation.runner import check_pipeline, format_table, run_replications, write_table_csv
from himdiag.simulation.schemas import Pipeline, SimModel, SimulationSpec, SSet
from himdiag.utils.errors import ConfigError, HimDiagError, InvalidArgument
from himdiag.utils.logger import logger

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3

DATA_COMMANDS = ("diagnose", "cook", "glm-diagnose")


class CliConfig(BaseModel):
    command: Literal["diagnose", "cook", "glm-diagnose", "simulate"]
    input_path: Optional[str] = None
    response_column: Optional[str] = None
    alpha: float = Field(default=settings.default_alpha, gt=0, lt=1)
    estimator: Estimator = Estimator(settings.default_estimator)
    d: Optional[int] = Field(default=None, ge=1)
    m: Optional[int] = Field(default=None, ge=1)
    model: Optional[SimModel] = None
    pipeline: Optional[Pipeline] = None
    kappa: List[float] = Field(default_factory=lambda: [0.0])
    s_set: SSet = SSet.S1
    n: int = Field(default=settings.default_n, ge=3)
    p: int = Field(default=settings.default_p, ge=1)
    n_infl: int = Field(default=settings.default_n_infl, ge=1)
    seed: int = 0
    replications: int = Field(default=settings.default_replications, ge=1)
    executor: Optional[Literal["serial", "threads", "celery"]] = None
    workers: Optional[int] = Field(default=None, ge=1)
    output_path: Optional[str] = None
    format: Optional[Literal["json", "csv"]] = None

    @model_validator(mode="after")
    def validate_required(self):
        if self.command in DATA_COMMANDS:
            if not self.input_path:
                raise ValueError(f"{self.command} requires --input")
            if self.response_column is None:
                raise ValueError(f"{self.command} requires --response")
        if self.command == "simulate" and self.model is None:
            raise ValueError("simulate requires --model")
        return self

    def simulation_spec(self) -> SimulationSpec:
        return SimulationSpec(
            model=self.model,
            n=self.n,
            p=self.p,
            n_infl=self.n_infl,
            kappas=self.kappa,
            s_set=self.s_set,
            alpha=self.alpha,
            estimator=self.estimator,
            seed=self.seed,
            replications=self.replications,
            d=self.d,
            m=self.m,
        )

    @property
    def output_format(self) -> str:
        if self.format is not None:
            return self.format
        return "csv" if self.command == "simulate" else "json"

    def default_pipeline(self) -> Pipeline:
        if self.pipeline is not None:
            return self.pipeline
        return Pipeline.GLM_HIM if self.model == SimModel.LOGISTIC else Pipeline.HIM


def build_config(**options) -> CliConfig:
    try:
        return CliConfig(**options)
    except ValidationError as exc:
        raise ConfigError(str(exc)) from exc


def cmd_diagnose(config: CliConfig) -> int:
    data = read_csv(config.input_path, config.response_column)
    report = diagnose(data, alpha=config.alpha, estimator=config.estimator, label=config.input_path)
    if config.output_format == "json":
        dump_json(report.to_dict(), config.output_path)
    else:
        flagged = np.zeros(data.n, dtype=bool)
        flagged[report.flagged] = True
        dump_frame(
            pd.DataFrame(
                {
                    "row": np.arange(data.n),
                    "score": report.scores.d,
                    "statistic": report.scores.stat,
                    "pvalue": report.pvalues,
                    "flagged": flagged,
                }
            ),
            config.output_path,
        )
    return EXIT_OK


def cmd_cook(config: CliConfig) -> int:
    data = read_csv(config.input_path, config.response_column)
    fit, distances = cooks_distance(data)
    cutoff = 4.0 / data.n
    above = np.flatnonzero(distances > cutoff)
    logger.info(f"{above.size} observations exceed the 4/n = {cutoff:.4g} rule of thumb")
    if config.output_format == "json":
        dump_json(
            {
                "meta": {"label": config.input_path, "method": "cook", "n": data.n, "p": data.p},
                "scores": [float(v) for v in distances],
                "leverage": [float(v) for v in fit.hat_diag],
                "residuals": [float(v) for v in fit.residuals],
                "flagged": [int(i) for i in above],
                "params": {"cutoff": cutoff, "sigma2": fit.sigma2},
            },
            config.output_path,
        )
    else:
        dump_frame(
            pd.DataFrame(
                {
                    "row": np.arange(data.n),
                    "cooks_distance": distances,
                    "leverage": fit.hat_diag,
                    "residual": fit.residuals,
                    "above_cutoff": distances > cutoff,
                }
            ),
            config.output_path,
        )
    return EXIT_OK


def cmd_glm_diagnose(config: CliConfig) -> int:
    data = read_csv(config.input_path, config.response_column)
    scores = glm_him_scores(data)
    m = config.m if config.m is not None else min(settings.default_n_infl, data.n)
    flagged = rank_influential(scores, m)
    if config.output_format == "json":
        dump_json(
            {
                "meta": {"label": config.input_path, "method": "glm-him", "n": data.n, "p": data.p},
                "scores": [float(v) for v in scores.d],
                "pairs_used": [int(v) for v in scores.pairs_used],
                "flagged": [int(i) for i in flagged],
                "params": {"m": m, "fit_failures": len(scores.fit_failures)},
            },
            config.output_path,
        )
    else:
        dump_frame(
            pd.DataFrame(
                {
                    "row": np.arange(data.n),
                    "score": scores.d,
                    "pairs_used": scores.pairs_used,
                    "flagged": np.isin(np.arange(data.n), flagged),
                }
            ),
            config.output_path,
        )
    return EXIT_OK


def cmd_simulate(config: CliConfig) -> int:
    try:
        spec = config.simulation_spec()
        pipeline = check_pipeline(spec, config.default_pipeline())
    except (ValidationError, InvalidArgument) as exc:
        raise ConfigError(str(exc)) from exc
    rows = run_replications(spec, pipeline, executor=config.executor, workers=config.workers)
    print(format_table(rows), end="")
    if config.output_path:
        if config.output_format == "json":
            dump_json({"rows": [row.model_dump() for row in rows]}, config.output_path)
        else:
            write_table_csv(rows, config.output_path)
    return EXIT_OK


COMMANDS = {
    "diagnose": cmd_diagnose,
    "cook": cmd_cook,
    "glm-diagnose": cmd_glm_diagnose,
    "simulate": cmd_simulate,
}


def run_command(config: CliConfig) -> int:
    """Dispatch and translate failures into exit codes"""
    try:
        code = COMMANDS[config.command](config)
    except ConfigError as exc:
        logger.error(f"Configuration error: {exc}")
        return EXIT_CONFIG
    except HimDiagError as exc:
        logger.error(f"{config.command} failed: {exc}")
        return EXIT_DATA
    logger.info(f"{config.command} finished")
    return code
