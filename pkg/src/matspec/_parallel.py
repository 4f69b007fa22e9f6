"""Order-stable parallel map used for lambda sweeps."""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor


def worker_count(requested: int | None = None) -> int:
    """Explicit request, else MATSPEC_WORKERS, else 1."""
    if requested is not None and requested > 0:
        return int(requested)
    env = os.environ.get("MATSPEC_WORKERS", "").strip()
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def pmap(fn, items, workers: int | None = None) -> list:
    """list(map(fn, items)), run in a process pool when workers > 1.

    Results come back in input order regardless of completion order, so
    reports built from them are reproducible.
    """
    items = list(items)
    w = worker_count(workers)
    if w <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=w) as ex:
        return list(ex.map(fn, items, chunksize=max(1, len(items) // (4 * w))))
