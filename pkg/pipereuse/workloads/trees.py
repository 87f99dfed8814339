# This source code is licensed under the Apache License, Version 2.0
# found in the LICENSE file in the root directory of this source tree.

import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, NamedTuple

import numpy as np

from pipereuse.dag import Dag, Node, OpSignature
from pipereuse.errors import ConfigurationError

logger = logging.getLogger("pipereuse")

TREE_ROOT = "r"


class CostModel(Enum):
    UNIFORM = "uniform"
    ROOT_HEAVY = "root_heavy"
    TWO_POINT = "two_point"


class SizeModel(Enum):
    UNIFORM = "uniform"
    TWO_POINT = "two_point"


@dataclass(frozen=True)
class TreeSpec:
    """Perfect k-ary tree of depth d with cost and size models.

    With ``coupled`` the two-point draws share one coin per node: a low size
    goes with a low cost and a high size with a high cost.
    """

    k: int
    d: int
    cost_model: CostModel = CostModel.UNIFORM
    cost: float = 1.0
    root_cost: float = 100.0
    cost_lo: float = 1.0
    cost_hi: float = 100.0
    cost_p: float = 0.5
    size_model: SizeModel = SizeModel.UNIFORM
    size: float = 1.0
    size_lo: float = 10.0
    size_hi: float = 50.0
    size_p: float = 0.5
    coupled: bool = False
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "cost_model", CostModel(self.cost_model))
        object.__setattr__(self, "size_model", SizeModel(self.size_model))
        if self.k < 2 or self.d < 1:
            raise ConfigurationError(f"Tree needs k >= 2 and d >= 1, got k={self.k}, d={self.d}")
        for p in (self.cost_p, self.size_p):
            if not 0.0 <= p <= 1.0:
                raise ConfigurationError(f"Probability {p} outside [0, 1]")
        if self.coupled and (self.cost_model != CostModel.TWO_POINT or self.size_model != SizeModel.TWO_POINT):
            raise ConfigurationError("coupled draws need two-point cost and size models")

    @property
    def pipelines(self) -> int:
        return self.k**self.d

    @property
    def nodes(self) -> int:
        return (self.k ** (self.d + 1) - 1) // (self.k - 1)

    @property
    def plan_length(self) -> int:
        return self.pipelines * (self.d + 1)

    @classmethod
    def costly_root(cls, d: int = 3) -> "TreeSpec":
        """Costly root: every node has size 10, the root costs 100 and the rest 1."""
        return cls(k=3, d=d, cost_model=CostModel.ROOT_HEAVY, cost=1.0, root_cost=100.0, size=10.0)

    @classmethod
    def mixed_costs(cls, d: int = 3, seed: int = 0) -> "TreeSpec":
        """Random sizes in {10, 50} with costs in {1, 100}, drawn together."""
        return cls(
            k=3,
            d=d,
            cost_model=CostModel.TWO_POINT,
            size_model=SizeModel.TWO_POINT,
            coupled=True,
            seed=seed,
        )


def gen_kary_tree(spec: TreeSpec) -> Dag:
    rng = np.random.default_rng(spec.seed)
    nodes = []
    edges = []
    frontier = [(TREE_ROOT, 0, None)]
    while frontier:
        next_frontier = []
        for node_id, depth, branch in frontier:
            params = () if branch is None else (("branch", branch),)
            cost, size = _draw(spec, rng, depth == 0)
            nodes.append(Node(node_id, OpSignature(f"level{depth}", params), cost, size))
            if depth < spec.d:
                for child in range(spec.k):
                    child_id = f"{node_id}.{child}"
                    edges.append((node_id, child_id))
                    next_frontier.append((child_id, depth + 1, child))
        frontier = next_frontier
    dag = Dag(nodes, edges, root=TREE_ROOT, synthetic_root=False)
    logger.info(f"generated {spec.k}-ary tree of depth {spec.d}: {len(dag)} nodes, {spec.pipelines} pipelines")
    return dag


def _draw(spec: TreeSpec, rng: np.random.Generator, is_root: bool):
    if spec.coupled:
        high = bool(rng.random() < spec.size_p)
        return (spec.cost_hi, spec.size_hi) if high else (spec.cost_lo, spec.size_lo)

    if spec.cost_model == CostModel.UNIFORM:
        cost = spec.cost
    elif spec.cost_model == CostModel.ROOT_HEAVY:
        cost = spec.root_cost if is_root else spec.cost
    else:
        cost = spec.cost_hi if rng.random() < spec.cost_p else spec.cost_lo

    if spec.size_model == SizeModel.UNIFORM:
        size = spec.size
    else:
        size = spec.size_hi if rng.random() < spec.size_p else spec.size_lo
    return cost, size


class InstanceDims(NamedTuple):
    k: int
    d: int
    pipelines: int
    nodes: int
    plan_length: int
    x_size: int


def instance_dimensions(ks=(2, 3, 4), ds=(2, 3, 4, 5)) -> List[InstanceDims]:
    """Instance dimensions of the exact program on perfect trees."""
    rows = []
    for k in ks:
        for d in ds:
            spec = TreeSpec(k=k, d=d)
            rows.append(InstanceDims(k, d, spec.pipelines, spec.nodes, spec.plan_length, spec.nodes * spec.plan_length))
    return rows
