# This source code is licensed under the Apache License, Version 2.0
# found in the LICENSE file in the root directory of this source tree.

import functools
import itertools

from pipereuse.errors import ConfigurationError

from .instance import IlpInstance

# 2^n resident sets per step are enumerated, keep instances small.
MAX_NODES = 12


def brute_force(instance: IlpInstance) -> float:
    """Optimal cost by enumerating every feasible schedule (no pruning, no dominance rules)."""
    if instance.n > MAX_NODES:
        raise ConfigurationError(f"brute force is limited to {MAX_NODES} nodes, got {instance.n}")
    sizes = [float(s) for s in instance.sizes]
    costs = [float(c) for c in instance.costs]

    def used(state: int) -> float:
        return sum(sizes[j] for j in range(instance.n) if state >> j & 1)

    @functools.lru_cache(maxsize=None)
    def best(t: int, state: int) -> float:
        if t == instance.T:
            return 0.0
        paid = costs[t] if not state & instance.active_masks[t] else 0.0
        item = instance.sequence[t]
        evictable = [j for j in range(instance.n) if state >> j & 1 and j != item]
        result = float("inf")
        for r in range(len(evictable) + 1):
            for subset in itertools.combinations(evictable, r):
                kept = state & ~sum(1 << j for j in subset)
                successors = [kept]
                if not kept >> item & 1:
                    successors.append(kept | 1 << item)
                for successor in successors:
                    if used(successor) <= instance.capacity:
                        result = min(result, paid + best(t + 1, successor))
        return result

    try:
        return best(0, 0)
    finally:
        best.cache_clear()
