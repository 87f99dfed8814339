# This source code is licensed under the Apache License, Version 2.0
# found in the LICENSE file in the root directory of this source tree.

import logging
from enum import Enum
from typing import Dict, Iterable, List, Sequence, Tuple

from pipereuse.dag import Dag, ExecutionPlan, Node, execution_plan
from pipereuse.errors import ConsistencyError, StructuralError

from .budget import SHParams, generation_allocations

logger = logging.getLogger("pipereuse")


class TrainingMode(Enum):
    # each generation continues from the previous one and pays only the extra resource
    WARM = "warm"
    # each generation retrains from scratch at its full cumulative resource
    RETRAIN = "retrain"


def training_scale(params: SHParams, mode: TrainingMode = TrainingMode.WARM) -> List[float]:
    """Training-sink cost multiplier per generation, relative to full resource R."""
    mode = TrainingMode(mode)
    allocations = generation_allocations(params)
    if mode == TrainingMode.RETRAIN:
        return [a.resource / params.R for a in allocations]
    return [a.incremental_resource / params.R for a in allocations]


def sh_subdags(
    dag: Dag,
    survivors_per_generation: Sequence[Iterable[str]],
    params: SHParams,
    mode: TrainingMode = TrainingMode.WARM,
) -> List[Dag]:
    """Pruned DAG of every SH generation.

    Survivors are given as training-sink node ids. Training cost scales linearly
    with the resource. Non-training nodes keep their ids so that a cache can
    reuse them across generations; training sinks get a per-generation id.
    """
    if len(survivors_per_generation) != params.G:
        raise ConsistencyError(f"Got survivors for {len(survivors_per_generation)} generations, G={params.G}")

    paths: Dict[str, Tuple[str, ...]] = {path[-1]: path for path in dag.paths()}
    survivors = [set(generation) for generation in survivors_per_generation]
    for g, generation in enumerate(survivors, start=1):
        missing = sorted(generation - set(paths))
        if missing:
            raise ConsistencyError(f"Survivors {missing} of generation {g} are not pipelines of the DAG")
        if not generation:
            raise ConsistencyError(f"Generation {g} has no survivors")
        if g > 1 and not generation <= survivors[g - 2]:
            raise ConsistencyError(f"Survivors of generation {g} are not a subset of generation {g - 1}")
        for sink in generation:
            if dag.children(sink):
                raise StructuralError(f"Pipeline ending at {sink} does not end at a training sink")

    if params.G == 1 and survivors[0] == set(paths):
        return [dag]

    scales = training_scale(params, mode)
    dags = []
    for g, (generation, scale) in enumerate(zip(survivors, scales), start=1):
        keep = set()
        for sink in generation:
            keep.update(paths[sink])
        rename = {sink: (f"{sink}@g{g}" if params.G > 1 else sink) for sink in generation}
        nodes = []
        for node_id in keep:
            node = dag.node(node_id)
            if node_id in rename:
                nodes.append(Node(rename[node_id], node.signature, node.cost * scale, node.size))
            else:
                nodes.append(node)
        edges = [(u, rename.get(v, v)) for u, v in dag.edges if u in keep and v in keep]
        dags.append(Dag(nodes, edges, root=dag.root, synthetic_root=dag.synthetic_root, terminals=rename.values()))
        logger.info(f"SH generation {g}: {len(generation)} pipelines, training scale {scale:g}")
    return dags


def concat_generations(dags: Sequence[Dag]) -> Tuple[Dag, ExecutionPlan]:
    """Union DAG and concatenated plan of all generations, the SH workload."""
    if not dags:
        raise ConsistencyError("No generation DAGs to concatenate")
    nodes: Dict[str, Node] = {}
    edges = set()
    terminals = set()
    plan = None
    for dag in dags:
        for node_id, node in dag.nodes.items():
            if nodes.setdefault(node_id, node) != node:
                raise ConsistencyError(f"Node {node_id} differs between generations")
        edges.update(dag.edges)
        terminals.update(dag.terminals)
        generation_plan = execution_plan(dag)
        plan = generation_plan if plan is None else plan.concat(generation_plan)
    first = dags[0]
    union = Dag(
        nodes.values(), sorted(edges), root=first.root, synthetic_root=first.synthetic_root, terminals=terminals
    )
    return union, plan
