from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, TypeVar

T = TypeVar("T")


def chunk_bounds(n: int, chunk: int) -> list[tuple[int, int]]:
    """Fixed ``[lo, hi)`` ranges covering ``0..n``; independent of worker count."""
    return [(lo, min(lo + chunk, n)) for lo in range(0, n, chunk)]


def map_chunks(
    fn: Callable[[int, int], T], n: int, chunk: int, workers: int = 1
) -> list[T]:
    """Apply ``fn(lo, hi)`` to every chunk and return results in chunk order.

    ``fn`` is expected to release the GIL (a ``nogil`` numba kernel) so that
    threads overlap.  Callers reduce the returned list in order, which keeps
    floating-point results identical for any ``workers``.
    """
    bounds = chunk_bounds(n, chunk)
    if workers <= 1 or len(bounds) <= 1:
        return [fn(lo, hi) for lo, hi in bounds]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda b: fn(*b), bounds))
