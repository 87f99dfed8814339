# This source code is licensed under the Apache License, Version 2.0
# found in the LICENSE file in the root directory of this source tree.

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Mapping, Optional, Sequence

import numpy as np

from pipereuse.errors import ConfigurationError

logger = logging.getLogger("pipereuse")

# Clamp for zero-cost nodes in the reciprocal weights.
EPSILON = float(np.finfo(np.float64).eps)


@dataclass
class PolicyStats:
    """Per-node bookkeeping visible to policies."""

    cost: float
    size: float
    last_use: int = -1
    ref_count: int = 0


@dataclass(frozen=True)
class CacheView:
    """What a policy sees when asked about admitting ``incoming`` at step ``t``."""

    t: int
    incoming: str
    resident: Sequence[str]
    used: float
    capacity: float
    stats: Mapping[str, PolicyStats]

    @property
    def free(self) -> float:
        return self.capacity - self.used


class CachePolicy:
    """Online admission/eviction strategy.

    ``decide`` returns None to skip admission, or the resident ids to evict
    before ``incoming`` is admitted.
    """

    name = "policy"

    def __init__(self, seed: int = 0):
        self.seed = seed
        self.reset(seed)

    def reset(self, seed: int) -> None:
        self.seed = seed

    def decide(self, view: CacheView) -> Optional[List[str]]:
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}(seed={self.seed})"


class LRUPolicy(CachePolicy):
    name = "LRU"

    def decide(self, view: CacheView) -> Optional[List[str]]:
        size = view.stats[view.incoming].size
        free = view.free
        evictions = []
        for node_id in sorted(view.resident, key=lambda n: (view.stats[n].last_use, n)):
            if size <= free:
                break
            evictions.append(node_id)
            free += view.stats[node_id].size
        return evictions


class LotteryPolicy(CachePolicy):
    """Eviction lottery in which the incoming item is also a candidate.

    Candidates are drawn without replacement with probability proportional to
    ``weight``. Drawing the incoming item rejects it and keeps every resident.
    """

    def reset(self, seed: int) -> None:
        super().reset(seed)
        self.rng = np.random.default_rng(seed)

    def weight(self, stats: PolicyStats) -> float:
        raise NotImplementedError

    def eviction_probabilities(self, candidates: Sequence[str], stats: Mapping[str, PolicyStats]) -> Dict[str, float]:
        weights = np.array([self.weight(stats[c]) for c in candidates], dtype=np.float64)
        if weights.sum() <= 0:
            weights = np.ones(len(candidates))
        return dict(zip(candidates, (weights / weights.sum()).tolist()))

    def decide(self, view: CacheView) -> Optional[List[str]]:
        size = view.stats[view.incoming].size
        free = view.free
        if size <= free:
            return []
        candidates = sorted(view.resident) + [view.incoming]
        evictions = []
        while size > free:
            probabilities = self.eviction_probabilities(candidates, view.stats)
            drawn = candidates[int(self.rng.choice(len(candidates), p=list(probabilities.values())))]
            if drawn == view.incoming:
                return None
            candidates.remove(drawn)
            evictions.append(drawn)
            free += view.stats[drawn].size
        return evictions


class ReciprocalPolicy(LotteryPolicy):
    name = "RECIPROCAL"

    def weight(self, stats: PolicyStats) -> float:
        return 1.0 / max(stats.cost, EPSILON)


class WeightedReciprocalPolicy(LotteryPolicy):
    name = "WRECIPROCAL"

    def weight(self, stats: PolicyStats) -> float:
        return stats.size / max(stats.cost, EPSILON)


class PolicyType(Enum):
    LRU = "LRU"
    RECIPROCAL = "RECIPROCAL"
    WRECIPROCAL = "WRECIPROCAL"


def policy_lru() -> CachePolicy:
    return LRUPolicy()


def policy_reciprocal(seed: int = 0) -> CachePolicy:
    return ReciprocalPolicy(seed)


def policy_wreciprocal(seed: int = 0) -> CachePolicy:
    return WeightedReciprocalPolicy(seed)


_POLICIES = {
    PolicyType.LRU: LRUPolicy,
    PolicyType.RECIPROCAL: ReciprocalPolicy,
    PolicyType.WRECIPROCAL: WeightedReciprocalPolicy,
}


def make_policy(name: str, seed: int = 0) -> CachePolicy:
    try:
        policy_type = PolicyType(str(name).upper())
    except ValueError:
        raise ConfigurationError(f'Unsupported policy "{name}", choose from {[p.value for p in PolicyType]}') from None
    return _POLICIES[policy_type](seed)
