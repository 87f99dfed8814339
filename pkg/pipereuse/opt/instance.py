# This source code is licensed under the Apache License, Version 2.0
# found in the LICENSE file in the root directory of this source tree.

import json
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np

from pipereuse.dag import Dag, ExecutionPlan, active_set
from pipereuse.errors import ConfigurationError


@dataclass(frozen=True, eq=False)
class IlpInstance:
    """The cache-dependent paging program for one plan and one capacity.

    Nodes are indexed by first appearance in the plan; ``sequence[t]`` is the
    index of i_t and ``active_masks[t]`` the bitmask of column A_t.
    """

    dag: Dag
    plan: ExecutionPlan
    capacity: float
    node_ids: Tuple[str, ...]
    sequence: Tuple[int, ...]
    costs: np.ndarray
    sizes: np.ndarray
    active: Tuple[Tuple[int, ...], ...]
    active_masks: Tuple[int, ...]
    index: Dict[str, int] = field(repr=False)

    @property
    def T(self) -> int:
        return len(self.sequence)

    @property
    def n(self) -> int:
        return len(self.node_ids)

    @property
    def x_variable_count(self) -> int:
        return self.n * self.T

    def total_recompute_cost(self) -> float:
        return float(self.costs.sum())


def build_instance(dag: Dag, plan: ExecutionPlan, capacity: float) -> IlpInstance:
    if capacity < 0:
        raise ConfigurationError(f"Cache capacity must be >= 0, got {capacity}")
    node_ids = tuple(plan.node_ids())
    index = {node_id: j for j, node_id in enumerate(node_ids)}
    sequence = tuple(index[node_id] for node_id in plan.sequence)
    active = tuple(tuple(sorted(index[n] for n in active_set(plan, t))) for t in range(len(plan)))
    active_masks = tuple(sum(1 << j for j in column) for column in active)
    return IlpInstance(
        dag=dag,
        plan=plan,
        capacity=float(capacity),
        node_ids=node_ids,
        sequence=sequence,
        costs=np.array([dag.node(node_id).cost for node_id in plan.sequence], dtype=np.float64),
        sizes=np.array([dag.node(node_id).size for node_id in node_ids], dtype=np.float64),
        active=active,
        active_masks=active_masks,
        index=index,
    )


@dataclass(frozen=True)
class DeltaSchedule:
    """Sparse Delta matrix: (t, node id, +1 admit | -1 evict)."""

    entries: Tuple[Tuple[int, str, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(tuple(e) for e in self.entries))

    def __len__(self):
        return len(self.entries)

    def at(self, t: int) -> List[Tuple[str, int]]:
        return [(node, delta) for step, node, delta in self.entries if step == t]

    def to_list(self) -> List[list]:
        return [list(e) for e in self.entries]

    def to_json(self) -> str:
        return json.dumps(self.to_list())

    @classmethod
    def from_json(cls, text: str) -> "DeltaSchedule":
        return cls(tuple((int(t), str(node), delta) for t, node, delta in json.loads(text)))
