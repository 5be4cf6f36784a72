"""Optional thread-based parallelism for pure evaluations.

The worker count is read from the PATHCERT_THREADS environment variable;
unset, empty, or 1 means serial execution.  Results always come back in
input order, so parallel runs are indistinguishable from serial ones.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")

_ENV_VAR = "PATHCERT_THREADS"
_MIN_PARALLEL_ITEMS = 64


def worker_count() -> int:
    raw = os.environ.get(_ENV_VAR, "").strip()
    if not raw:
        return 1
    try:
        count = int(raw)
    except ValueError:
        return 1
    return max(count, 1)


def map_ordered(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """Map preserving order, threaded when PATHCERT_THREADS allows it."""
    seq = list(items)
    workers = worker_count()
    if workers <= 1 or len(seq) < _MIN_PARALLEL_ITEMS:
        return [fn(item) for item in seq]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, seq))
