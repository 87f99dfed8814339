# This source code is licensed under the Apache License, Version 2.0
# found in the LICENSE file in the root directory of this source tree.

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from pipereuse.cache.simulator import CAPACITY_TOLERANCE

from .instance import DeltaSchedule, IlpInstance

INITIAL_EMPTY = "initial_empty"
ADMIT_ONLY_ACTIVE = "admit_only_active"
EVICT_ONLY_RESIDENT = "evict_only_resident"
DELTA_BOUNDS = "delta_bounds"
INTEGRALITY = "integrality"
CUMULATIVE_STATE = "cumulative_state"
CAPACITY = "capacity"


@dataclass(frozen=True)
class Violation:
    constraint: str
    t: Optional[int]
    node: Optional[str]
    message: str


@dataclass
class DeltaValidation:
    feasible: bool
    cost: Optional[float]
    violations: List[Violation] = field(default_factory=list)


def validate_delta(instance: IlpInstance, schedule: DeltaSchedule) -> DeltaValidation:
    """Check a schedule against every constraint family and price it.

    Delta at step t is applied after step t is priced, so the cost of step t
    only sees items admitted at earlier steps. Violations are returned.
    """
    violations: List[Violation] = []
    by_step: Dict[int, Dict[str, float]] = defaultdict(lambda: defaultdict(float))

    for entry in schedule.entries:
        t, node, delta = entry
        if not isinstance(t, int) or t < 0 or t >= instance.T:
            constraint = INITIAL_EMPTY if isinstance(t, int) and t < 0 else DELTA_BOUNDS
            violations.append(Violation(constraint, t, node, f"step {t} outside 0..{instance.T - 1}"))
            continue
        if node not in instance.index:
            violations.append(Violation(DELTA_BOUNDS, t, node, f"unknown node {node}"))
            continue
        if float(delta) != int(delta):
            violations.append(Violation(INTEGRALITY, t, node, f"non-integral delta {delta}"))
            continue
        by_step[t][node] += delta

    resident = set()
    used = 0.0
    cost = 0.0
    for t in range(instance.T):
        active_node = instance.node_ids[instance.sequence[t]]
        active = {instance.node_ids[j] for j in instance.active[t]}
        if not resident & active:
            cost += float(instance.costs[t])

        for node, delta in sorted(by_step.get(t, {}).items()):
            if delta == 0:
                continue
            if node == active_node and delta < 0:
                violations.append(Violation(DELTA_BOUNDS, t, node, f"active node evicted (delta {delta})"))
                continue
            if node != active_node and delta > 0:
                violations.append(Violation(ADMIT_ONLY_ACTIVE, t, node, f"admits {node} while {active_node} is active"))
                continue
            if abs(delta) > 1:
                violations.append(Violation(DELTA_BOUNDS, t, node, f"delta {delta} outside [-1, 1]"))
                continue
            if delta < 0:
                if node not in resident:
                    violations.append(Violation(EVICT_ONLY_RESIDENT, t, node, f"evicts non-resident {node}"))
                    continue
                resident.remove(node)
                used -= instance.sizes[instance.index[node]]
            else:
                if node in resident:
                    violations.append(Violation(CUMULATIVE_STATE, t, node, f"admits resident {node}, X would be 2"))
                    continue
                resident.add(node)
                used += instance.sizes[instance.index[node]]

        if used > instance.capacity + CAPACITY_TOLERANCE:
            violations.append(Violation(CAPACITY, t, None, f"used {used:g} exceeds capacity {instance.capacity:g}"))

    feasible = not violations
    return DeltaValidation(feasible=feasible, cost=cost if feasible else None, violations=violations)
