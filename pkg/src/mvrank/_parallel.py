"""Order-preserving process-pool map used for replicate-level parallelism."""

from collections.abc import Callable, Iterable
from concurrent.futures import ProcessPoolExecutor
from typing import TypeVar

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(fn: Callable[[T], R], tasks: Iterable[T], workers: int = 1) -> list[R]:
    """Applies ``fn`` to every task and returns results in task order.

    ``fn`` must be a module-level function when ``workers > 1``.
    """
    tasks = list(tasks)
    if workers <= 1 or len(tasks) <= 1:
        return [fn(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
        return list(pool.map(fn, tasks))


def split_range(total: int, parts: int) -> list[range]:
    """Splits ``range(total)`` into at most ``parts`` contiguous, non-empty ranges."""
    parts = max(1, min(parts, total))
    bounds = [total * k // parts for k in range(parts + 1)]
    return [range(bounds[k], bounds[k + 1]) for k in range(parts) if bounds[k] < bounds[k + 1]]
