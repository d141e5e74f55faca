# himdiag/celery_app.py
from celery import Celery

from himdiag.config import settings


def make_celery():
    celery = Celery(
        "himdiag",
        broker=settings.celery_broker_url,
        backend=settings.celery_result_backend,
        include=["himdiag.tasks.simulation_tasks"],
    )

    celery.conf.update(
        task_serializer="json",
        accept_content=["json"],
        result_serializer="json",
        timezone="UTC",
        enable_utc=True,
        result_expires=3600,
        task_always_eager=settings.celery_task_always_eager,
        task_eager_propagates=True,

        task_routes={
            "himdiag.tasks.simulation_tasks.*": {"queue": settings.simulation_queue},
        },

        # Replications are CPU bound; one at a time per worker process
        worker_prefetch_multiplier=1,
        task_acks_late=True,
        worker_max_tasks_per_child=1000,
    )

    return celery


celery_app = make_celery()
