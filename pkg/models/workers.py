"""Worker-pool sizing and ordered parallel map."""

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

THREADS_ENV = "TRACKFORGE_THREADS"

T = TypeVar("T")
R = TypeVar("R")


def worker_count(requested: Optional[int] = None) -> int:
    """
    Number of workers to use.

    An explicit request wins, then TRACKFORGE_THREADS; 0 means one per CPU.
    """
    if requested is None:
        raw = os.environ.get(THREADS_ENV, "0").strip() or "0"
        try:
            requested = int(raw)
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if requested < 0:
        raise ValueError(f"worker count must be >= 0, got {requested}")
    return requested or (os.cpu_count() or 1)


def ordered_map(fn: Callable[[T], R], items: Iterable[T], workers: Optional[int] = None) -> List[R]:
    """map() over a thread pool; results come back in input order."""
    items = list(items)
    n = min(worker_count(workers), max(len(items), 1))
    if n == 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
