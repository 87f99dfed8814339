# This source code is licensed under the Apache License, Version 2.0
# found in the LICENSE file in the root directory of this source tree.

from .cost import (
    level_sizes,
    max_redundant_pipelines,
    max_speedup_uniform,
    node_counts,
    speedup,
    speedup_ratio,
    total_cost_independent,
    total_cost_merged,
)
from .graph import ROOT_ID, ROOT_SIGNATURE, Dag, Node, PipelineSpec, merge_pipelines
from .plan import ExecutionPlan, PlanStep, active_set, execution_plan
from .signature import OpSignature, canonical_value
