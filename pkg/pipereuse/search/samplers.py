# This source code is licensed under the Apache License, Version 2.0
# found in the LICENSE file in the root directory of this source tree.

import itertools
import logging
import math
from enum import Enum
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from pipereuse.dag import OpSignature, PipelineSpec
from pipereuse.errors import ConfigurationError, GridOverflowError

from .domains import BranchingPlan, OperatorChoice, SearchSpace, StageSpec

logger = logging.getLogger("pipereuse")

DEFAULT_GRID_CAP = 100_000
# Sibling draws that collide with an earlier sibling are redrawn this many times at most.
MAX_REDRAWS = 100


class SamplerType(Enum):
    RANDOM = "random"
    GRID = "grid"
    GRIDDED_RANDOM = "gridded_random"


def sample_random(space: SearchSpace, n: int, seed: int = 0) -> List[PipelineSpec]:
    """n independent configurations, operators chosen uniformly per stage."""
    if n < 1:
        raise ConfigurationError(f"Random search needs n >= 1, got {n}")
    rng = np.random.default_rng(seed)
    pipelines = []
    for _ in range(n):
        stages = []
        for stage in space.stages:
            operator = stage.operators[int(rng.integers(len(stage.operators)))]
            stages.append(operator.sample(rng))
        pipelines.append(PipelineSpec(tuple(stages)))
    return pipelines


def _count_for(counts: Mapping[str, int], operator: OperatorChoice, param: str, default_count: int) -> int:
    return int(counts.get(f"{operator.name}.{param}", counts.get(param, default_count)))


def stage_grid(stage: StageSpec, counts: Mapping[str, int], default_count: int = 2) -> List[OpSignature]:
    """Every grid signature of a stage: product of param grids, concatenated over operators."""
    values = []
    for operator in stage.operators:
        names = [name for name, _ in operator.params]
        grids = [domain.grid(_count_for(counts, operator, name, default_count)) for name, domain in operator.params]
        for combination in itertools.product(*grids):
            values.append(OpSignature(operator.name, tuple(zip(names, combination))))
    return values


def sample_grid(
    space: SearchSpace,
    per_dim_counts: Optional[Mapping[str, int]] = None,
    *,
    default_count: int = 2,
    max_configs: int = DEFAULT_GRID_CAP,
) -> List[PipelineSpec]:
    """Full Cartesian product; the same value set is reused under every parent.

    ``per_dim_counts`` is keyed by ``"operator.param"`` (or just ``"param"``).
    """
    counts = dict(per_dim_counts or {})
    if any(int(c) < 1 for c in counts.values()):
        raise ConfigurationError(f"Grid counts must be >= 1, got {counts}")
    stage_values = [stage_grid(stage, counts, default_count) for stage in space.stages]
    size = math.prod(len(values) for values in stage_values)
    if size > max_configs:
        raise GridOverflowError(f"Grid of {size:,d} configurations exceeds the cap of {max_configs:,d}")
    logger.info(f"grid search: {' x '.join(str(len(v)) for v in stage_values)} = {size} configurations")
    return [PipelineSpec(stages) for stages in itertools.product(*stage_values)]


def _operator_order(n_operators: int, seed: int, path: Tuple[int, ...]) -> List[int]:
    """Seeded operator order of the node at ``path``, independent of its branching factor."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, 1], spawn_key=path))
    return [int(index) for index in rng.permutation(n_operators)]


def _allocate(branching: int, n_operators: int, seed: int, path: Tuple[int, ...]) -> List[int]:
    """Operator index for each of ``branching`` children.

    Child i takes operator ``order[i % n_operators]``: counts differ by at most
    one, the remainder goes to a seeded subset of operators, and child i keeps
    its operator when the branching factor grows.
    """
    order = _operator_order(n_operators, seed, path)
    return [order[child % n_operators] for child in range(branching)]


def _draw_children(stage: StageSpec, branching: int, seed: int, path: Tuple[int, ...]) -> List[OpSignature]:
    children: List[OpSignature] = []
    for child, operator_index in enumerate(_allocate(branching, len(stage.operators), seed, path)):
        operator = stage.operators[operator_index]
        rng = np.random.default_rng(np.random.SeedSequence([seed, 0], spawn_key=path + (child,)))
        signature = operator.sample(rng)
        attempts = 0
        while signature in children and attempts < MAX_REDRAWS:
            signature = operator.sample(rng)
            attempts += 1
        if signature in children:
            logger.warning(f"gridded random: stage {stage.name} cannot draw {branching} distinct siblings")
        children.append(signature)
    return children


def sample_gridded_random(space: SearchSpace, branching: BranchingPlan, seed: int = 0) -> List[PipelineSpec]:
    """Tree-structured sampling: every node draws its own fresh children.

    Randomness for child j of the node at tree path ``path`` comes from its own
    seed sequence, so adding a branch never changes the draws of its siblings.
    """
    if not isinstance(branching, BranchingPlan):
        branching = BranchingPlan(tuple(branching))
    branching.check(space)

    pipelines: List[PipelineSpec] = []
    stack: List[Tuple[Tuple[int, ...], Tuple[OpSignature, ...]]] = [((), ())]
    while stack:
        path, prefix = stack.pop()
        depth = len(path)
        if depth == len(space):
            pipelines.append(PipelineSpec(prefix))
            continue
        children = _draw_children(space.stages[depth], branching.factors[depth], seed, path)
        for child in reversed(range(len(children))):
            stack.append((path + (child,), prefix + (children[child],)))
    logger.info(f"gridded random search: branching {branching.factors} -> {len(pipelines)} configurations")
    return pipelines


def sample_configurations(
    space: SearchSpace,
    sampler_type: SamplerType,
    *,
    seed: int = 0,
    n: int = 1,
    branching: Optional[Sequence[int]] = None,
    per_dim_counts: Optional[Dict[str, int]] = None,
    default_count: int = 2,
    max_configs: int = DEFAULT_GRID_CAP,
) -> List[PipelineSpec]:
    if sampler_type == SamplerType.RANDOM:
        logger.info(f"sampler: random, n={n}")
        return sample_random(space, n, seed)
    elif sampler_type == SamplerType.GRID:
        logger.info("sampler: grid")
        return sample_grid(space, per_dim_counts, default_count=default_count, max_configs=max_configs)
    elif sampler_type == SamplerType.GRIDDED_RANDOM:
        logger.info("sampler: gridded random")
        if branching is None:
            raise ConfigurationError("gridded random search needs a branching plan")
        return sample_gridded_random(space, BranchingPlan(tuple(branching)), seed)
    raise ConfigurationError(f'Unsupported sampler "{sampler_type}"')
