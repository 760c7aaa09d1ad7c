"""Order-preserving process pool map; results never depend on the worker count."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable, Sequence


def parallel_map(fn: Callable[..., Any], tasks: Sequence[tuple], workers: int = 1) -> list:
    if workers < 1:
        raise ValueError("workers must be >= 1")
    if workers == 1 or len(tasks) <= 1:
        return [fn(*t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        futs = [ex.submit(fn, *t) for t in tasks]
        return [f.result() for f in futs]
