"""Order-preserving chunked map over a thread pool.

Chunk boundaries depend only on the problem size, never on the thread
count, and results come back in chunk order; reductions done afterwards
therefore see the same array whatever the pool size.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, TypeVar

T = TypeVar("T")

CHUNK = 1 << 13


def spans(n: int, chunk: int = CHUNK) -> list[tuple[int, int]]:
    return [(i, min(i + chunk, n)) for i in range(0, n, chunk)]


def chunked_map(fn: Callable[[int, int], T], n: int, threads: int = 1,
                chunk: int = CHUNK) -> list[T]:
    parts = spans(n, chunk)
    if threads > 1 and len(parts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda s: fn(*s), parts))
    return [fn(a, b) for a, b in parts]
