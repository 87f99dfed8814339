# This source code is licensed under the Apache License, Version 2.0
# found in the LICENSE file in the root directory of this source tree.

from collections import Counter
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from pipereuse.errors import ConfigurationError, UndefinedRatioError

from .graph import Dag, PipelineSpec, StageValues, merge_pipelines, stage_value
from .signature import OpSignature


def total_cost_independent(
    pipelines: Sequence[PipelineSpec],
    costs: Optional[StageValues] = None,
    *,
    root_cost: float = 0.0,
) -> float:
    """TP(P): every stage of every pipeline paid once per occurrence.

    A costed data source (``root_cost``) is counted once per pipeline here and
    once in total in the merged sum.
    """
    total = 0.0
    for pipeline in pipelines:
        total += root_cost
        for stage_index, signature in enumerate(pipeline.stages):
            total += stage_value(costs, stage_index, signature, "cost")
    return total


def total_cost_merged(dag: Dag) -> float:
    """TP(P_merged): every distinct node paid once."""
    return float(sum(node.cost for node in dag.nodes.values()))


def speedup_ratio(independent: float, merged: float) -> float:
    if merged <= 0:
        raise UndefinedRatioError(f"Speedup undefined for a merged cost of {merged}")
    return independent / merged


def speedup(
    pipelines: Sequence[PipelineSpec],
    costs: Optional[StageValues] = None,
    *,
    root_cost: float = 0.0,
) -> float:
    dag = merge_pipelines(pipelines, costs, root_cost=root_cost)
    # Duplicates were merged away; the independent sum still pays for them.
    return speedup_ratio(total_cost_independent(pipelines, costs, root_cost=root_cost), total_cost_merged(dag))


def max_speedup_uniform(stage_count: int, pipeline_count: int) -> Fraction:
    """Upper bound |V||P| / (|V| + |P| - 1) for unit costs and equal-length pipelines."""
    if stage_count < 1 or pipeline_count < 1:
        raise ConfigurationError(f"Need |V| >= 1 and |P| >= 1, got {stage_count} and {pipeline_count}")
    return Fraction(stage_count * pipeline_count, stage_count + pipeline_count - 1)


def max_redundant_pipelines(stage_count: int, pipeline_count: int) -> List[PipelineSpec]:
    """Pipelines that share every stage but the last one, attaining the bound above."""
    if stage_count < 1 or pipeline_count < 1:
        raise ConfigurationError(f"Need |V| >= 1 and |P| >= 1, got {stage_count} and {pipeline_count}")
    prefix = tuple(OpSignature(f"stage{index}") for index in range(stage_count - 1))
    return [
        PipelineSpec(prefix + (OpSignature.create(f"stage{stage_count - 1}", {"variant": variant}),))
        for variant in range(pipeline_count)
    ]


def node_counts(pipelines: Sequence[PipelineSpec]) -> Tuple[int, int]:
    """(unmerged, merged) operator node counts."""
    unmerged = sum(len(pipeline) for pipeline in pipelines)
    merged = len(merge_pipelines(pipelines).operator_nodes())
    return unmerged, merged


def level_sizes(dag: Dag) -> List[int]:
    """Operator nodes per depth, starting at the first operator level."""
    depths = dag.depths()
    offset = 1 if dag.synthetic_root else 0
    counts = Counter(depth for node_id, depth in depths.items() if not (dag.synthetic_root and node_id == dag.root))
    if not counts:
        return []
    return [counts.get(depth, 0) for depth in range(offset, max(counts) + 1)]
