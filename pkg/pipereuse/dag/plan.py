# This source code is licensed under the Apache License, Version 2.0
# found in the LICENSE file in the root directory of this source tree.

from dataclasses import dataclass, field
from typing import FrozenSet, List, Optional, Tuple

from pipereuse.errors import StructuralError

from .graph import Dag


@dataclass(frozen=True)
class PlanStep:
    t: int
    node: str
    path_index: int
    position: int


@dataclass(frozen=True)
class ExecutionPlan:
    """Root-to-sink paths in execution order.

    ``paths`` hold the node ids that are actually computed; a synthetic root is
    not part of them and is kept in ``root`` only to recover the covered edges.
    """

    paths: Tuple[Tuple[str, ...], ...]
    root: Optional[str] = None
    steps: Tuple[PlanStep, ...] = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "paths", tuple(tuple(path) for path in self.paths))
        steps = []
        for path_index, path in enumerate(self.paths):
            if not path:
                raise StructuralError(f"Plan path {path_index} is empty")
            for position, node in enumerate(path):
                steps.append(PlanStep(len(steps), node, path_index, position))
        object.__setattr__(self, "steps", tuple(steps))

    def __len__(self):
        return len(self.steps)

    @property
    def T(self) -> int:
        return len(self.steps)

    @property
    def sequence(self) -> List[str]:
        """The vector i: node computed at every step."""
        return [step.node for step in self.steps]

    def node_ids(self) -> List[str]:
        """Distinct nodes in order of first appearance."""
        seen = {}
        for step in self.steps:
            seen.setdefault(step.node, None)
        return list(seen)

    def covered_edges(self) -> List[Tuple[str, str]]:
        edges = []
        for path in self.paths:
            full = ((self.root,) + path) if self.root is not None else path
            edges.extend(zip(full[:-1], full[1:]))
        return edges

    def step_at(self, t: int) -> PlanStep:
        if not 0 <= t < len(self.steps):
            raise IndexError(f"Step {t} out of range for a plan of {len(self.steps)} steps")
        return self.steps[t]

    def concat(self, other: "ExecutionPlan") -> "ExecutionPlan":
        root = self.root if self.root is not None else other.root
        return ExecutionPlan(self.paths + other.paths, root=root)


def execution_plan(dag: Dag) -> ExecutionPlan:
    """Depth-first plan: children in ascending signature order, every path emitted in full."""
    paths = dag.paths()
    if dag.synthetic_root:
        paths = [path[1:] for path in paths if len(path) > 1]
    if not paths:
        raise StructuralError("DAG has no sink to plan for")
    return ExecutionPlan(tuple(paths), root=dag.root if dag.synthetic_root else None)


def active_set(plan: ExecutionPlan, t: int) -> FrozenSet[str]:
    """Column A_t: i_t and every node after it on the active path."""
    step = plan.step_at(t)
    return frozenset(plan.paths[step.path_index][step.position :])
