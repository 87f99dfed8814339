# This source code is licensed under the Apache License, Version 2.0
# found in the LICENSE file in the root directory of this source tree.

import json
import logging
import os
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import networkx as nx

from pipereuse.dag import ROOT_ID, ROOT_SIGNATURE, Dag, Node, OpSignature, PipelineSpec
from pipereuse.errors import ConfigurationError, ProfileError

logger = logging.getLogger("pipereuse")

SCHEMA_VERSION = 1
DEFAULT_METADATA = {"time_unit": "s", "memory_unit": "MB", "dataset": "unknown"}


def _parse_node(record: Mapping[str, Any], position: int) -> Tuple[Node, List[str]]:
    name = record.get("id", f"#{position}") if isinstance(record, Mapping) else f"#{position}"
    if not isinstance(record, Mapping):
        raise ProfileError(name, "record is not an object")
    for key in ("id", "operator", "cost", "size"):
        if key not in record:
            raise ProfileError(name, f"missing field {key!r}")
    try:
        cost = float(record["cost"])
        size = float(record["size"])
    except (TypeError, ValueError):
        raise ProfileError(name, "cost and size must be numbers") from None
    if cost < 0:
        raise ProfileError(name, f"negative cost {cost}")
    if size < 0:
        raise ProfileError(name, f"negative size {size}")
    try:
        signature = OpSignature.create(str(record["operator"]), record.get("params") or {})
    except (TypeError, ValueError) as e:
        raise ProfileError(name, f"bad params: {e}") from None
    parents = [str(p) for p in record.get("parents") or ()]
    return Node(str(record["id"]), signature, cost, size), parents


def profile_to_dag(profile: Mapping[str, Any]) -> Dag:
    version = profile.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigurationError(f"Unsupported profile schema_version {version!r}, expected {SCHEMA_VERSION}")
    metadata = profile.get("metadata") or {}
    missing_units = [key for key in ("time_unit", "memory_unit") if key not in metadata]
    if missing_units:
        raise ConfigurationError(f"Profile metadata does not declare {missing_units}")

    nodes: Dict[str, Node] = {}
    parents: Dict[str, List[str]] = {}
    for position, record in enumerate(profile.get("nodes") or ()):
        node, node_parents = _parse_node(record, position)
        if node.id in nodes:
            raise ProfileError(node.id, "duplicate id")
        nodes[node.id] = node
        parents[node.id] = node_parents
    if not nodes:
        raise ConfigurationError("Profile has no nodes")

    for node_id, node_parents in parents.items():
        for parent in node_parents:
            if parent not in nodes:
                raise ProfileError(node_id, f"orphan: unknown parent {parent!r}")

    graph = nx.DiGraph()
    graph.add_nodes_from(nodes)
    graph.add_edges_from((p, c) for c, ps in parents.items() for p in ps)
    try:
        cycle = nx.find_cycle(graph)
    except nx.NetworkXNoCycle:
        cycle = None
    if cycle:
        raise ProfileError(cycle[0][0], f"cycle through {[u for u, _ in cycle]}")

    sources = [node_id for node_id, ps in parents.items() if not ps]
    edges = list(graph.edges)
    if len(sources) == 1:
        return Dag(nodes.values(), edges, root=sources[0], synthetic_root=False)
    if ROOT_ID in nodes:
        raise ProfileError(ROOT_ID, "id is reserved when the profile has several sources")
    root = Node(ROOT_ID, ROOT_SIGNATURE)
    edges += [(ROOT_ID, source) for source in sources]
    return Dag([root, *nodes.values()], edges, root=ROOT_ID, synthetic_root=True)


def load_profile(path: str) -> Tuple[Dag, List[PipelineSpec]]:
    """Read a profile file; pipelines are the root-to-sink paths."""
    if not os.path.exists(path):
        raise ConfigurationError(f"Profile file not found: {path}")
    with open(path) as f:
        try:
            profile = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"Profile {path} is not valid JSON: {e}") from None
    dag = profile_to_dag(profile)
    pipelines = dag.pipelines()
    logger.info(f"loaded profile {path}: {len(dag)} nodes, {len(pipelines)} pipelines")
    return dag, pipelines


def dag_to_profile(dag: Dag, metadata: Optional[Mapping[str, Any]] = None) -> dict:
    records = []
    for node in dag:
        if dag.synthetic_root and node.id == dag.root:
            continue
        parents = [p for p in dag.parents(node.id) if not (dag.synthetic_root and p == dag.root)]
        records.append(
            {
                "id": node.id,
                "operator": node.signature.operator_name,
                "params": node.signature.as_dict(),
                "cost": node.cost,
                "size": node.size,
                "parents": parents,
            }
        )
    return {"schema_version": SCHEMA_VERSION, "metadata": {**DEFAULT_METADATA, **(metadata or {})}, "nodes": records}


def save_profile(dag: Dag, path: str, metadata: Optional[Mapping[str, Any]] = None) -> str:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w") as f:
        json.dump(dag_to_profile(dag, metadata), f, indent=2)
    logger.info(f"saved profile with {len(dag)} nodes to {path}")
    return path


StageTable = Union[Sequence[float], Mapping[str, float]]


def _stage_lookup(table: Optional[StageTable], node: Node, stage: int) -> Optional[float]:
    if table is None:
        return None
    if isinstance(table, Mapping):
        return table.get(node.signature.operator_name)
    if stage >= len(table):
        raise ConfigurationError(f"Stage table {list(table)} has no entry for stage {stage}")
    return table[stage]


def annotate_stages(dag: Dag, costs: Optional[StageTable] = None, sizes: Optional[StageTable] = None) -> Dag:
    """Assign cost/size per stage (a list by stage index) or per operator name.

    Stage 0 is the first operator level; a synthetic root keeps cost and size 0.
    """
    offset = 1 if dag.synthetic_root else 0
    new_costs, new_sizes = {}, {}
    for node_id, depth in dag.depths().items():
        if dag.synthetic_root and node_id == dag.root:
            continue
        node = dag.node(node_id)
        cost = _stage_lookup(costs, node, depth - offset)
        size = _stage_lookup(sizes, node, depth - offset)
        if cost is not None:
            new_costs[node_id] = cost
        if size is not None:
            new_sizes[node_id] = size
    return dag.replace(costs=new_costs, sizes=new_sizes)


def backloaded_stage_costs(upstream: Sequence[float], training_factor: float = 4.0) -> List[float]:
    """Stage costs whose last (training) stage costs ``training_factor`` times the upstream sum."""
    return list(upstream) + [training_factor * float(sum(upstream))]
