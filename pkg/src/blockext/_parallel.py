from __future__ import annotations

from collections.abc import Callable, Iterable
from concurrent.futures import ProcessPoolExecutor


def pmap(fn: Callable, items: Iterable, workers: int = 1) -> list:
    """Ordered map, optionally across worker processes.

    ``fn`` must be picklable when ``workers > 1``. Results come back in input
    order, so serial and parallel runs are interchangeable.
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    chunksize = max(1, len(items) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=chunksize))
