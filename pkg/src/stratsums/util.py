"""Worker-pool helper: deterministic chunked parallel map."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor


def chunk_ranges(total: int, workers: int):
    """Split [0, total) into at most `workers` contiguous ranges."""
    if total <= 0:
        return []
    workers = max(1, min(workers, total))
    step = (total + workers - 1) // workers
    return [(lo, min(lo + step, total)) for lo in range(0, total, step)]


def parallel_map(fn, items, workers: int = 1):
    """Map fn over items, preserving order.  Results are identical for any
    worker count; workers > 1 uses a thread pool."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
