# This source code is licensed under the Apache License, Version 2.0
# found in the LICENSE file in the root directory of this source tree.

import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, List, TypeVar

logger = logging.getLogger("pipereuse")

T = TypeVar("T")
R = TypeVar("R")


def map_ordered(fn: Callable[[T], R], items: Iterable[T], num_workers: int = 1) -> List[R]:
    """Apply ``fn`` to every item, in worker processes when ``num_workers > 1``.

    Results come back in input order whatever the completion order. ``fn`` and
    the items must be picklable.
    """
    items = list(items)
    if num_workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    workers = min(num_workers, len(items))
    logger.info(f"running {len(items)} tasks on {workers} worker processes")
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, items))
