# This source code is licensed under the Apache License, Version 2.0
# found in the LICENSE file in the root directory of this source tree.

import itertools
import logging
import math
import sys
import time
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Tuple

from pipereuse.cache.policies import LRUPolicy
from pipereuse.cache.simulator import simulate
from pipereuse.cache.trials import trace_to_schedule

from .instance import DeltaSchedule, IlpInstance

logger = logging.getLogger("pipereuse")

# node visits between two time-limit checks
CLOCK_STRIDE = 1024


class StopReason(Enum):
    OPTIMAL = "optimal"
    STATE_BUDGET = "state_budget"
    TIME_LIMIT = "time_limit"


@dataclass
class OptResult:
    optimal_cost: float
    schedule: DeltaSchedule
    proved_optimal: bool
    explored_states: int
    wall_time: float
    stop_reason: StopReason = StopReason.OPTIMAL

    def to_dict(self) -> dict:
        """Persisted form: identical for identical inputs, so wall-clock dependent fields are left out."""
        timed_out = self.stop_reason == StopReason.TIME_LIMIT
        return {
            "optimal_cost": self.optimal_cost,
            "proved_optimal": self.proved_optimal,
            "stop_reason": self.stop_reason.value,
            "explored_states": None if timed_out else self.explored_states,
            "schedule": self.schedule.to_list(),
        }


class _Timeout(Exception):
    def __init__(self, reason: StopReason):
        super().__init__(reason.value)
        self.reason = reason


def _bits(mask: int) -> List[int]:
    result = []
    while mask:
        low = mask & -mask
        result.append(low.bit_length() - 1)
        mask ^= low
    return result


class _Search:
    """Memoized depth-first search over (step, resident set) states."""

    def __init__(self, instance: IlpInstance, time_limit: Optional[float], max_states: Optional[int]):
        self.instance = instance
        self.T = instance.T
        self.sizes = [float(s) for s in instance.sizes]
        self.costs = [float(c) for c in instance.costs]
        self.capacity = instance.capacity
        self.time_limit = time_limit
        self.max_states = max_states
        self.deadline: Optional[float] = None
        self.visits = 0

        # live[t]: items that still appear in some active column at step >= t
        live = [0] * (self.T + 1)
        for t in range(self.T - 1, -1, -1):
            live[t] = live[t + 1] | instance.active_masks[t]
        self.live = live

        # Steps t' >= t whose column holds no node computed in t..t'-1: none of
        # them can be admitted before t', so t' pays unless already resident.
        self.unavoidable: List[List[Tuple[int, float]]] = []
        for t in range(self.T):
            seen = 0
            entries = []
            for later in range(t, self.T):
                mask = instance.active_masks[later]
                if not mask & seen and self.costs[later] > 0:
                    entries.append((mask, self.costs[later]))
                seen |= 1 << instance.sequence[later]
            self.unavoidable.append(entries)

        self.exact: Dict[Tuple[int, int], float] = {}
        self.lower: Dict[Tuple[int, int], float] = {}
        self.choice: Dict[Tuple[int, int], Tuple[int, int]] = {}

    def start_clock(self) -> None:
        if self.time_limit is not None:
            self.deadline = time.perf_counter() + self.time_limit

    def used(self, mask: int) -> float:
        return sum(self.sizes[j] for j in _bits(mask))

    def lower_bound(self, t: int, state: int) -> float:
        return sum(cost for mask, cost in self.unavoidable[t] if not mask & state)

    def dead(self, t: int) -> int:
        item = 1 << self.instance.sequence[t]
        return ~self.live[t + 1] & ~item

    def options(self, t: int, state: int) -> List[Tuple[int, int]]:
        """(evicted mask, next state) pairs; admissions first, larger evictions first."""
        item = self.instance.sequence[t]
        bit = 1 << item
        size = self.sizes[item]
        options = []
        if not state & bit and size <= self.capacity and self.live[t + 1] & bit:
            residents = _bits(state)
            need = self.used(state) + size - self.capacity
            if need <= 0:
                options.append((0, state | bit))
            else:
                minimal = []
                for r in range(1, len(residents) + 1):
                    for subset in itertools.combinations(residents, r):
                        freed = sum(self.sizes[j] for j in subset)
                        if freed < need:
                            continue
                        if any(freed - self.sizes[j] >= need for j in subset):
                            continue
                        mask = sum(1 << j for j in subset)
                        minimal.append((-freed, mask))
                for _, mask in sorted(minimal):
                    options.append((mask, (state & ~mask) | bit))
        options.append((0, state))
        return options

    def search(self, t: int, state: int, budget: float) -> float:
        """Exact residual cost if below ``budget``, otherwise a lower bound >= budget."""
        if t == self.T:
            return 0.0
        key = (t, state)
        if key in self.exact:
            return self.exact[key]
        self.visits += 1
        if self.max_states is not None and self.visits > self.max_states:
            raise _Timeout(StopReason.STATE_BUDGET)
        if self.deadline is not None and self.visits % CLOCK_STRIDE == 1 and time.perf_counter() >= self.deadline:
            raise _Timeout(StopReason.TIME_LIMIT)

        bound = max(self.lower.get(key, 0.0), self.lower_bound(t, state))
        if bound >= budget:
            return bound

        paid = self.costs[t] if not state & self.instance.active_masks[t] else 0.0
        state = state & ~self.dead(t)
        best = math.inf
        best_option = None
        for evicted, successor in self.options(t, state):
            value = paid + self.search(t + 1, successor, min(budget, best) - paid)
            if value < best:
                best = value
                best_option = (evicted, successor)

        if best < budget:
            self.exact[key] = best
            self.choice[key] = best_option
        else:
            self.lower[key] = max(self.lower.get(key, 0.0), best)
        return best

    def schedule(self) -> DeltaSchedule:
        entries = []
        state = 0
        for t in range(self.T):
            key = (t, state)
            evicted, successor = self.choice[key]
            node_ids = self.instance.node_ids
            for j in _bits(state & self.dead(t)) + _bits(evicted):
                entries.append((t, node_ids[j], -1))
            if successor & ~state:
                entries.append((t, node_ids[self.instance.sequence[t]], +1))
            state = successor
        return DeltaSchedule(tuple(entries))


def _incumbent(instance: IlpInstance) -> Tuple[float, DeltaSchedule]:
    recompute = instance.total_recompute_cost()
    lru = simulate(instance.plan, instance.dag, LRUPolicy(), instance.capacity)
    if lru.total_cost < recompute:
        return lru.total_cost, trace_to_schedule(lru)
    return recompute, DeltaSchedule()


def solve_exact(
    instance: IlpInstance, time_limit: Optional[float] = None, max_states: Optional[int] = None
) -> OptResult:
    """Optimal cache schedule by bounded memoized search.

    ``max_states`` caps the number of expanded states and gives the same answer
    on every run; ``time_limit`` (seconds, counted from the start of the search
    proper) does not. When either stops the search, the best of LRU and never
    caching is returned with ``proved_optimal=False``.
    """
    start = time.perf_counter()
    search = _Search(instance, time_limit, max_states)
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 4 * instance.T + 200))
    stop_reason = StopReason.OPTIMAL
    search.start_clock()
    try:
        cost = search.search(0, 0, math.inf)
        schedule = search.schedule()
    except _Timeout as stop:
        stop_reason = stop.reason
        cost, schedule = _incumbent(instance)
        logger.warning(f"exact search stopped ({stop_reason.value}), returning incumbent cost {cost:g}")
    finally:
        sys.setrecursionlimit(limit)
    proved = stop_reason == StopReason.OPTIMAL
    wall_time = time.perf_counter() - start
    logger.info(
        f"solve_exact: T={instance.T} n={instance.n} capacity={instance.capacity:g} "
        f"cost={cost:g} states={search.visits} proved={proved} ({wall_time:.3f}s)"
    )
    return OptResult(cost, schedule, proved, search.visits, wall_time, stop_reason)
