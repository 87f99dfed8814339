# This source code is licensed under the Apache License, Version 2.0
# found in the LICENSE file in the root directory of this source tree.

import logging
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import networkx as nx

from pipereuse.errors import ConfigurationError, StructuralError

from .signature import OpSignature

logger = logging.getLogger("pipereuse")

ROOT_ID = "root"
ROOT_SIGNATURE = OpSignature("__input__")

# Either a signature -> value table or a callable (stage index, signature) -> value.
StageValues = Union[Mapping[OpSignature, float], Callable[[int, OpSignature], float]]


@dataclass(frozen=True)
class Node:
    id: str
    signature: OpSignature
    cost: float = 0.0
    size: float = 0.0

    def __post_init__(self):
        if self.cost < 0:
            raise ConfigurationError(f"Node {self.id} has negative cost {self.cost}")
        if self.size < 0:
            raise ConfigurationError(f"Node {self.id} has negative size {self.size}")


@dataclass(frozen=True)
class PipelineSpec:
    """One pipeline configuration, stages listed from source to sink."""

    stages: Tuple[OpSignature, ...]

    def __post_init__(self):
        object.__setattr__(self, "stages", tuple(self.stages))
        if not self.stages:
            raise ConfigurationError("A pipeline needs at least one stage")

    def __len__(self):
        return len(self.stages)

    def __iter__(self) -> Iterator[OpSignature]:
        return iter(self.stages)


def stage_value(values: Optional[StageValues], index: int, signature: OpSignature, what: str = "cost") -> float:
    if values is None:
        return 1.0
    if callable(values) and not isinstance(values, Mapping):
        value = values(index, signature)
        if value is None:
            raise ConfigurationError(f"No {what} assigned to signature {signature.canonical}")
        return float(value)
    try:
        return float(values[signature])
    except KeyError:
        raise ConfigurationError(f"No {what} assigned to signature {signature.canonical}") from None


class Dag:
    """A rooted DAG of pipeline stages.

    Nodes are annotated with cost (time units) and size (memory units). The root
    is either a synthetic zero-cost input node shared by all pipelines, or a real
    costed node (generated trees, profiles with a single source).
    """

    def __init__(
        self,
        nodes: Iterable[Node],
        edges: Iterable[Tuple[str, str]],
        *,
        root: str = ROOT_ID,
        synthetic_root: bool = True,
        terminals: Optional[Iterable[str]] = None,
        duplicate_pipelines: int = 0,
    ):
        self._nodes: Dict[str, Node] = {}
        for node in nodes:
            if node.id in self._nodes:
                raise StructuralError(f"Duplicate node id {node.id}")
            self._nodes[node.id] = node
        if root not in self._nodes:
            raise StructuralError(f"Root {root} is not a node of the DAG")
        self.root = root
        self.synthetic_root = synthetic_root
        self.duplicate_pipelines = duplicate_pipelines

        graph = nx.DiGraph()
        graph.add_nodes_from(self._nodes)
        for parent, child in edges:
            if parent not in self._nodes or child not in self._nodes:
                raise StructuralError(f"Edge ({parent}, {child}) references an unknown node")
            graph.add_edge(parent, child)
        if not nx.is_directed_acyclic_graph(graph):
            raise StructuralError("Graph contains a cycle")
        if graph.in_degree(root) != 0:
            raise StructuralError(f"Root {root} has parents")
        reachable = nx.descendants(graph, root) | {root}
        unreachable = sorted(set(self._nodes) - reachable)
        if unreachable:
            raise StructuralError(f"Nodes not reachable from the root: {unreachable}")
        self._graph = graph

        self._children: Dict[str, Tuple[str, ...]] = {
            node_id: tuple(sorted(graph.successors(node_id), key=self._order_key)) for node_id in self._nodes
        }
        self._parents: Dict[str, Tuple[str, ...]] = {
            node_id: tuple(sorted(graph.predecessors(node_id), key=self._order_key)) for node_id in self._nodes
        }
        sinks = [node_id for node_id, children in self._children.items() if not children]
        if terminals is None:
            terminal_set = set(sinks)
        else:
            terminal_set = set(terminals) | set(sinks)
            unknown = terminal_set - set(self._nodes)
            if unknown:
                raise StructuralError(f"Unknown terminal nodes {sorted(unknown)}")
        if synthetic_root:
            terminal_set.discard(root)
        self._terminals = frozenset(terminal_set)

    def _order_key(self, node_id: str):
        return (self._nodes[node_id].signature.canonical, node_id)

    def __len__(self):
        return len(self._nodes)

    def __contains__(self, node_id):
        return node_id in self._nodes

    def __iter__(self) -> Iterator[Node]:
        for node_id in nx.lexicographical_topological_sort(self._graph, key=self._order_key):
            yield self._nodes[node_id]

    def node(self, node_id: str) -> Node:
        return self._nodes[node_id]

    @property
    def nodes(self) -> Dict[str, Node]:
        return dict(self._nodes)

    @property
    def edges(self) -> List[Tuple[str, str]]:
        return sorted(self._graph.edges, key=lambda edge: (self._order_key(edge[0]), self._order_key(edge[1])))

    def children(self, node_id: str) -> Tuple[str, ...]:
        return self._children[node_id]

    def parents(self, node_id: str) -> Tuple[str, ...]:
        return self._parents[node_id]

    def sinks(self) -> List[str]:
        return sorted((n for n, c in self._children.items() if not c), key=self._order_key)

    @property
    def terminals(self) -> frozenset:
        return self._terminals

    def operator_nodes(self) -> List[Node]:
        """All nodes except a synthetic root."""
        return [node for node in self if not (self.synthetic_root and node.id == self.root)]

    def depths(self) -> Dict[str, int]:
        return dict(nx.single_source_shortest_path_length(self._graph, self.root))

    def is_merged(self) -> bool:
        for children in self._children.values():
            signatures = [self._nodes[child].signature for child in children]
            if len(set(signatures)) != len(signatures):
                return False
        return True

    def to_networkx(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        for node in self._nodes.values():
            graph.add_node(node.id, signature=node.signature.canonical, cost=node.cost, size=node.size)
        graph.add_edges_from(self._graph.edges)
        return graph

    def replace(self, costs: Mapping[str, float] = None, sizes: Mapping[str, float] = None) -> "Dag":
        """Copy of this DAG with per-node cost and/or size overrides."""
        costs = costs or {}
        sizes = sizes or {}
        nodes = [
            Node(n.id, n.signature, costs.get(n.id, n.cost), sizes.get(n.id, n.size)) for n in self._nodes.values()
        ]
        return Dag(
            nodes,
            self._graph.edges,
            root=self.root,
            synthetic_root=self.synthetic_root,
            terminals=self._terminals,
            duplicate_pipelines=self.duplicate_pipelines,
        )

    def subdag(self, keep: Iterable[str], terminals: Optional[Iterable[str]] = None) -> "Dag":
        """Induced sub-DAG on the given node ids (the root is always kept)."""
        keep = set(keep) | {self.root}
        nodes = [self._nodes[node_id] for node_id in keep]
        edges = [(u, v) for u, v in self._graph.edges if u in keep and v in keep]
        if terminals is not None:
            terminals = set(terminals) & keep
        else:
            terminals = self._terminals & keep
        return Dag(nodes, edges, root=self.root, synthetic_root=self.synthetic_root, terminals=terminals)

    def paths(self) -> List[Tuple[str, ...]]:
        """Every root-to-terminal path in depth-first order (root included)."""
        result = []
        stack: List[Tuple[str, Tuple[str, ...]]] = [(self.root, (self.root,))]
        while stack:
            node_id, path = stack.pop()
            if node_id in self._terminals:
                result.append(path)
            for child in reversed(self._children[node_id]):
                stack.append((child, path + (child,)))
        return result

    def pipelines(self) -> List[PipelineSpec]:
        """Pipelines recovered as root-to-terminal paths."""
        pipelines = []
        for path in self.paths():
            ids = path[1:] if self.synthetic_root else path
            if ids:
                pipelines.append(PipelineSpec(tuple(self._nodes[i].signature for i in ids)))
        return pipelines

    def path_of(self, pipeline: PipelineSpec) -> Optional[Tuple[str, ...]]:
        """Root-to-terminal path of a pipeline, or None if it is not in the DAG."""
        stages = list(pipeline.stages)
        if not self.synthetic_root:
            if self._nodes[self.root].signature != stages[0]:
                return None
            stages = stages[1:]
        path = [self.root]
        for signature in stages:
            match = next((c for c in self._children[path[-1]] if self._nodes[c].signature == signature), None)
            if match is None:
                return None
            path.append(match)
        if path[-1] not in self._terminals:
            return None
        return tuple(path)

    def __repr__(self):
        return f"Dag(nodes={len(self)}, edges={self._graph.number_of_edges()}, root={self.root!r})"


def merge_pipelines(
    pipelines: Sequence[PipelineSpec],
    costs: Optional[StageValues] = None,
    sizes: Optional[StageValues] = None,
    *,
    root_cost: float = 0.0,
    root_size: float = 0.0,
) -> Dag:
    """Merge pipelines into a DAG by collapsing shared prefixes.

    Two stages collapse into one node iff they have the same ancestor chain and
    equal signatures. ``costs``/``sizes`` default to unit values.
    Duplicate pipelines are dropped and counted in ``Dag.duplicate_pipelines``.
    """
    nodes: Dict[str, Node] = {ROOT_ID: Node(ROOT_ID, ROOT_SIGNATURE, root_cost, root_size)}
    edges: List[Tuple[str, str]] = []
    index: Dict[Tuple[str, OpSignature], str] = {}
    terminals = set()
    duplicates = 0

    for pipeline in pipelines:
        if not len(pipeline):
            raise ConfigurationError("Cannot merge an empty pipeline")
        parent = ROOT_ID
        created = False
        for stage_index, signature in enumerate(pipeline.stages):
            key = (parent, signature)
            node_id = index.get(key)
            if node_id is None:
                node_id = f"n{len(nodes)}"
                nodes[node_id] = Node(
                    node_id,
                    signature,
                    stage_value(costs, stage_index, signature, "cost"),
                    stage_value(sizes, stage_index, signature, "size"),
                )
                edges.append((parent, node_id))
                index[key] = node_id
                created = True
            parent = node_id
        if not created and parent in terminals:
            duplicates += 1
        terminals.add(parent)

    if duplicates:
        logger.warning(f"merge_pipelines: dropped {duplicates} duplicate pipeline(s)")

    return Dag(
        nodes.values(),
        edges,
        root=ROOT_ID,
        synthetic_root=True,
        terminals=terminals,
        duplicate_pipelines=duplicates,
    )
