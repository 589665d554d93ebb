from __future__ import annotations

from collections import deque
from concurrent.futures import Future, ThreadPoolExecutor
from typing import Callable, Iterable, Iterator, TypeVar

A = TypeVar("A")
B = TypeVar("B")


def ordered_map(fn: Callable[[A], B], items: Iterable[A], max_workers: int = 1) -> Iterator[B]:
    """Lazily map ``fn`` over ``items`` with at most ``max_workers`` calls in flight.

    Results come back in input order regardless of completion order, so output
    files are reproducible even when the stage runs concurrently.  Exceptions
    raised by ``fn`` propagate when their result is reached.
    """
    if max_workers <= 1:
        for it in items:
            yield fn(it)
        return
    window: deque[Future] = deque()
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        for it in items:
            window.append(pool.submit(fn, it))
            if len(window) >= max_workers:
                yield window.popleft().result()
        while window:
            yield window.popleft().result()
