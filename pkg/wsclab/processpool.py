from typing import Any, Callable, List, Sequence, TypeVar

import psutil
from multiprocess import Pool

from .exceptions import ConfigurationError
from .logging import logger

T = TypeVar("T")


def worker_count(parallel: int, jobs: int) -> int:
    if parallel < 0:
        raise ConfigurationError("must be >= 0", field="parallel")
    workers = (psutil.cpu_count(logical=True) or 1) if parallel == 0 else parallel
    return max(1, min(workers, jobs))


def _call(job: tuple) -> Any:
    fn, args = job
    return fn(*args)


def run_jobs(fn: Callable[..., T], jobs: Sequence[tuple], parallel: int = 1) -> List[T]:
    """Apply `fn(*args)` to every job; results come back in job order.

    `parallel` 1 runs in this process, 0 uses one worker per logical CPU.
    """
    workers = worker_count(parallel, len(jobs))
    if workers == 1:
        return [fn(*args) for args in jobs]

    logger.info(f"Running {len(jobs)} jobs on {workers} worker processes")
    with Pool(processes=workers) as pool:
        return pool.map(_call, [(fn, args) for args in jobs], chunksize=1)
