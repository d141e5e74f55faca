# himdiag/tasks/simulation_tasks.py
from typing import Any, Dict, List

from himdiag.celery_app import celery_app
from himdiag.config import settings
from himdiag.simulation.runner import run_single
from himdiag.simulation.schemas import Pipeline, SimulationSpec
from himdiag.utils.logger import logger


@celery_app.task(
    bind=True,
    time_limit=settings.simulation_task_timeout,
    name="himdiag.tasks.simulation_tasks.run_replication_task",
)
def run_replication_task(self, spec_json: str, pipeline: str, replication: int) -> List[Dict[str, Any]]:
    """
    Run one replication over the whole kappa grid and return its metric rows
    """
    spec = SimulationSpec.model_validate_json(spec_json)
    rows = run_single(spec, Pipeline(pipeline), replication)
    logger.debug(f"Task {self.request.id}: replication {replication} produced {len(rows)} rows")
    return [row.model_dump() for row in rows]
