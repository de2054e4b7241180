"""Order-preserving parallel map used by the grid sweeps."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")

WORKERS_ENV = "HFREADOUT_WORKERS"


def resolve_workers(workers: int | None = None) -> int:
    """Explicit argument, else ``$HFREADOUT_WORKERS``, else 1."""
    if workers is None:
        env = os.environ.get(WORKERS_ENV)
        workers = int(env) if env else 1
    if workers < 1:
        raise ValueError(f"worker count must be >= 1, got {workers}")
    return workers


def ordered_map(
    func: Callable[[T], R], items: Iterable[T], workers: int | None = None, chunksize: int = 16
) -> list[R]:
    """``[func(x) for x in items]``, optionally spread over processes.

    Results come back in input order whatever the worker count, so callers
    can write them into preallocated arrays by index.
    """
    items = list(items)
    n = resolve_workers(workers)
    if n == 1 or len(items) <= 1:
        return [func(x) for x in items]
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(func, items, chunksize=chunksize))
