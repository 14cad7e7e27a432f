# app/harness/runner.py
from concurrent.futures import ProcessPoolExecutor
from itertools import repeat
from typing import Any, Callable, List, TypeVar

from app.utils.logger import get_logger

logger = get_logger()

T = TypeVar("T")


def run_replications(task: Callable[[Any, int], T], payload: Any, replications: int, jobs: int = 1) -> List[T]:
    """Run ``task(payload, index)`` for every replication index.

    ``task`` must be a module-level function and ``payload`` picklable when
    ``jobs > 1``. Results come back ordered by replication index regardless
    of which worker finished first.
    """
    name = getattr(task, "__name__", "task")
    logger.info(f"Running {replications} replications of {name} with {jobs} worker(s)")
    if jobs <= 1 or replications <= 1:
        results = []
        for index in range(replications):
            results.append(task(payload, index))
            if (index + 1) % 10 == 0:
                logger.info(f"{name}: {index + 1}/{replications} replications done")
        return results
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        results = list(pool.map(task, repeat(payload), range(replications)))
    logger.info(f"{name}: {replications}/{replications} replications done")
    return results
