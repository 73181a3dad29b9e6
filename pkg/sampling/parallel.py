"""
Parallel Map
Runs independent work items on a thread pool. Items carry their own stream
keys and results come back in input order, so output never depends on the
thread count.
"""
import logging
import os
from concurrent.futures import ThreadPoolExecutor

from config import THREADS_ENV
from core.errors import InvalidInputError

logger = logging.getLogger(__name__)


def resolve_threads(threads=None):
    """--threads, else $SCHATTEN_LAB_THREADS, else the number of cores."""
    if threads is None:
        env = os.environ.get(THREADS_ENV)
        if env:
            try:
                threads = int(env)
            except ValueError as e:
                raise InvalidInputError(f"{THREADS_ENV} must be an integer, got {env!r}") from e
        else:
            threads = os.cpu_count() or 1
    threads = int(threads)
    if threads < 1:
        raise InvalidInputError("threads must be at least 1", threads=threads)
    return threads


def parallel_map(fn, items, threads=None):
    """``[fn(item) for item in items]``, computed on up to ``threads`` workers."""
    items = list(items)
    workers = min(resolve_threads(threads), max(len(items), 1))
    if workers == 1:
        return [fn(item) for item in items]
    logger.debug("mapping %d items on %d threads", len(items), workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
