# This source code is licensed under the Apache License, Version 2.0
# found in the LICENSE file in the root directory of this source tree.

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

from pipereuse.dag import Dag, ExecutionPlan
from pipereuse.errors import ConfigurationError, PolicyContractError

from .policies import CachePolicy, CacheView, PolicyStats

logger = logging.getLogger("pipereuse")

# Slack on capacity checks for sizes that are not exact binary fractions.
CAPACITY_TOLERANCE = 1e-9


class StepOutcome(Enum):
    COMPUTED = "computed"
    SKIPPED = "skipped"


@dataclass(frozen=True)
class StepTrace:
    t: int
    node: str
    path: int
    outcome: StepOutcome
    cost: float
    admissions: Tuple[str, ...] = ()
    evictions: Tuple[str, ...] = ()
    hit: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "node": self.node,
            "path": self.path,
            "outcome": self.outcome.value,
            "cost": self.cost,
            "admissions": list(self.admissions),
            "evictions": list(self.evictions),
        }


@dataclass
class SimResult:
    policy: str
    capacity: float
    seed: int
    total_cost: float
    trace: List[StepTrace] = field(default_factory=list)

    @property
    def computed(self) -> int:
        return sum(1 for step in self.trace if step.outcome == StepOutcome.COMPUTED)

    def write_trace(self, path: str) -> None:
        with open(path, "w") as f:
            for step in self.trace:
                f.write(json.dumps(step.to_dict()) + "\n")


def admissible(size: float, capacity: float) -> bool:
    """Whether an item fits the cache at all."""
    return size <= capacity


def simulate(
    plan: ExecutionPlan,
    dag: Dag,
    policy: CachePolicy,
    capacity: float,
    seed: Optional[int] = None,
) -> SimResult:
    """Replay ``plan`` against a bounded cache managed by ``policy``.

    Step t pays c_t iff nothing on its active path (from i_t to the sink) was
    resident before the step. The policy is then asked whether to admit i_t.
    """
    if capacity < 0:
        raise ConfigurationError(f"Cache capacity must be >= 0, got {capacity}")
    seed = policy.seed if seed is None else seed
    policy.reset(seed)

    stats: Dict[str, PolicyStats] = {}
    resident: Dict[str, None] = {}
    used = 0.0
    total = 0.0
    trace = []

    for step in plan.steps:
        node = dag.node(step.node)
        node_stats = stats.setdefault(node.id, PolicyStats(cost=node.cost, size=node.size))
        node_stats.ref_count += 1
        active = plan.paths[step.path_index][step.position :]
        hit = next((n for n in active if n in resident), None)
        if hit is None:
            paid = node.cost
            total += paid
            node_stats.last_use = step.t
            outcome = StepOutcome.COMPUTED
        else:
            paid = 0.0
            stats[hit].last_use = step.t
            outcome = StepOutcome.SKIPPED

        admissions: Tuple[str, ...] = ()
        evictions: Tuple[str, ...] = ()
        if node.id not in resident and admissible(node.size, capacity):
            view = CacheView(step.t, node.id, tuple(resident), used, capacity, stats)
            decision = policy.decide(view)
            if decision is not None:
                evictions = tuple(decision)
                for victim in evictions:
                    if victim not in resident:
                        raise PolicyContractError(f"{policy.name} evicted non-resident {victim} at step {step.t}")
                    del resident[victim]
                    used -= stats[victim].size
                if used + node.size > capacity + CAPACITY_TOLERANCE:
                    raise PolicyContractError(f"{policy.name} admitted {node.id} beyond capacity at step {step.t}")
                resident[node.id] = None
                used += node.size
                admissions = (node.id,)

        trace.append(StepTrace(step.t, node.id, step.path_index, outcome, paid, admissions, evictions, hit))

    return SimResult(policy=policy.name, capacity=capacity, seed=seed, total_cost=total, trace=trace)


def replay_cost(plan: ExecutionPlan, dag: Dag, trace: Sequence[StepTrace], capacity: float) -> float:
    """Recompute the total cost from a trace's admissions and evictions alone."""
    resident = set()
    used = 0.0
    total = 0.0
    for step, record in zip(plan.steps, trace):
        active = plan.paths[step.path_index][step.position :]
        if not resident.intersection(active):
            total += dag.node(step.node).cost
        for victim in record.evictions:
            resident.remove(victim)
            used -= dag.node(victim).size
        for admitted in record.admissions:
            resident.add(admitted)
            used += dag.node(admitted).size
        if used > capacity + CAPACITY_TOLERANCE:
            raise PolicyContractError(f"Trace exceeds capacity {capacity} at step {step.t}")
    return total
