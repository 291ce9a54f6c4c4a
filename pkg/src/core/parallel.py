from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Optional, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

JOBS_ENV = "FWM_JOBS"


def default_jobs() -> int:
    raw = os.getenv(JOBS_ENV, "1")
    try:
        jobs = int(raw)
    except ValueError:
        logger.warning("ignoring non-integer %s=%r", JOBS_ENV, raw)
        return 1
    return max(jobs, 1)


def run_ordered(
    fn: Callable[[T], R], items: Iterable[T], jobs: int = 1, *, label: Optional[str] = None
) -> list[R]:
    """Map fn over items, in parallel worker processes when jobs > 1.

    Results come back in input order either way, so reductions over them are
    deterministic. fn and items must pickle. A label turns on progress lines.
    """
    items = list(items)
    total = len(items)
    results: list[R] = []
    if jobs <= 1 or total <= 1:
        for item in items:
            results.append(fn(item))
            _progress(label, len(results), total)
        return results
    with ProcessPoolExecutor(max_workers=min(jobs, total)) as pool:
        for result in pool.map(fn, items):
            results.append(result)
            _progress(label, len(results), total)
    return results


def _progress(label: Optional[str], done: int, total: int) -> None:
    if label is not None:
        logger.info("%s progress: %d/%d", label, done, total)
