# This source code is licensed under the Apache License, Version 2.0
# found in the LICENSE file in the root directory of this source tree.

"""Workload resolution and policy sweeps shared by the command-line tools."""

import functools
import logging
import math
import os
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np
from omegaconf import OmegaConf

from pipereuse.cache import make_policy, run_trials, summarize, summary_frame, write_summary_csv
from pipereuse.dag import (
    Dag,
    ExecutionPlan,
    OpSignature,
    PipelineSpec,
    execution_plan,
    level_sizes,
    max_speedup_uniform,
    merge_pipelines,
    node_counts,
    speedup_ratio,
    total_cost_merged,
)
from pipereuse.early_stopping import (
    SHParams,
    SHResult,
    SyntheticOracle,
    TrainingMode,
    concat_generations,
    sh_budget,
    sh_subdags,
    successive_halving,
)
from pipereuse.errors import ConfigurationError
from pipereuse.logging import MetricLogger
from pipereuse.opt import build_instance, solve_exact
from pipereuse.search import SamplerType, load_space, sample_configurations
from pipereuse.utils.parallel import map_ordered
from pipereuse.workloads import (
    TreeSpec,
    annotate_stages,
    backloaded_stage_costs,
    builtin_space,
    gen_kary_tree,
    load_profile,
)

logger = logging.getLogger("pipereuse")

OPT_POLICY = "OPT"


@dataclass
class Workload:
    name: str
    dag: Dag
    pipelines: List[PipelineSpec]
    plan: ExecutionPlan
    # cost the speedups are measured against, the plan cost when unset
    baseline: Optional[float] = None

    @property
    def independent_cost(self) -> float:
        """TP(P): every step of the plan recomputed."""
        if self.baseline is not None:
            return self.baseline
        return float(sum(self.dag.node(node_id).cost for node_id in self.plan.sequence))

    @property
    def total_size(self) -> float:
        return float(sum(self.dag.node(node_id).size for node_id in self.plan.node_ids()))


def toy_pipelines() -> List[PipelineSpec]:
    """Three pipelines sharing operator A and, for two of them, B."""
    a = OpSignature.create("A", {"p": 0.1})
    b2, b4 = OpSignature.create("B", {"p": 2}), OpSignature.create("B", {"p": 4})
    c = {value: OpSignature.create("C", {"p": value}) for value in (10, 5, 8)}
    return [PipelineSpec((a, b2, c[10])), PipelineSpec((a, b2, c[5])), PipelineSpec((a, b4, c[8]))]


def disjoint_pipelines(count: int = 3, stages: int = 3) -> List[PipelineSpec]:
    return [
        PipelineSpec(tuple(OpSignature.create(f"op{stage}", {"pipeline": index}) for stage in range(stages)))
        for index in range(count)
    ]


def _resolve_space(name: str):
    if os.path.exists(name):
        return load_space(name)
    return builtin_space(name)


def _stage_table(value):
    return OmegaConf.to_container(value, resolve=True) if OmegaConf.is_config(value) else value


def _stage_costs(cfg, stage_count: int):
    costs = _stage_table(cfg.workload.stage_costs)
    factor = cfg.workload.training_factor
    if factor is not None:
        if isinstance(costs, dict):
            raise ConfigurationError("training_factor needs stage_costs as a list by stage index")
        upstream = costs[: stage_count - 1] if costs is not None else [1.0] * (stage_count - 1)
        costs = backloaded_stage_costs(upstream, float(factor))
    return costs


def resolve_workload(cfg) -> Workload:
    source = cfg.workload.source
    if source == "tree":
        try:
            spec = TreeSpec(**OmegaConf.to_container(cfg.workload.tree, resolve=True), seed=cfg.seed)
        except (TypeError, ValueError) as e:
            raise ConfigurationError(f"Invalid tree workload: {e}") from None
        dag = gen_kary_tree(spec)
        name = f"tree_k{spec.k}_d{spec.d}"
        pipelines = dag.pipelines()
    elif source == "profile":
        if not cfg.workload.profile:
            raise ConfigurationError("workload.source=profile needs workload.profile")
        dag, pipelines = load_profile(cfg.workload.profile)
        name = os.path.splitext(os.path.basename(cfg.workload.profile))[0]
    elif source in ("toy", "disjoint"):
        pipelines = toy_pipelines() if source == "toy" else disjoint_pipelines()
        dag = merge_pipelines(pipelines)
        name = source
    elif source == "space":
        space = _resolve_space(cfg.workload.space)
        try:
            sampler_type = SamplerType(cfg.workload.sampler)
        except ValueError:
            raise ConfigurationError(f'Unsupported sampler "{cfg.workload.sampler}"') from None
        pipelines = sample_configurations(
            space,
            sampler_type,
            seed=cfg.seed,
            n=cfg.workload.n,
            branching=list(cfg.workload.branching) if cfg.workload.branching is not None else None,
            per_dim_counts=OmegaConf.to_container(cfg.workload.grid_counts, resolve=True),
            default_count=cfg.workload.grid_default_count,
            max_configs=cfg.workload.grid_cap,
        )
        dag = merge_pipelines(pipelines)
        costs = _stage_costs(cfg, len(space))
        sizes = cfg.workload.stage_sizes
        if costs is not None or sizes is not None:
            dag = annotate_stages(dag, costs, _stage_table(sizes))
        name = f"{space.name}_{cfg.workload.sampler}"
    else:
        raise ConfigurationError(f'Unresolvable workload source "{source}"')
    return Workload(name, dag, pipelines, execution_plan(dag))


def resolve_capacities(cfg, workload: Workload) -> List[float]:
    capacities = cfg.capacities
    if capacities["values"] is not None:
        values = [float(v) for v in capacities["values"]]
    else:
        stop = capacities.stop if capacities.stop is not None else workload.total_size
        if capacities.start <= 0 or stop < capacities.start or capacities.num < 1:
            raise ConfigurationError(f"Bad geometric capacity range {OmegaConf.to_container(capacities)}")
        values = [float(v) for v in np.geomspace(capacities.start, stop, capacities.num)]
        if capacities.include_zero:
            values.append(0.0)
    if not values:
        raise ConfigurationError("Capacity sweep is empty")
    if any(v < 0 for v in values):
        raise ConfigurationError(f"Capacities must be >= 0, got {values}")
    return sorted(set(values))


@dataclass(frozen=True)
class SweepTask:
    policy: str
    capacity: float


def _opt_row(workload: Workload, capacity: float, opt_cfg) -> dict:
    instance = build_instance(workload.dag, workload.plan, capacity)
    if not opt_cfg.force and (instance.n > opt_cfg.max_nodes or instance.T > opt_cfg.max_steps):
        logger.warning(
            f"OPT skipped at capacity {capacity:g}: n={instance.n} T={instance.T} beyond "
            f"n<={opt_cfg.max_nodes}, T<={opt_cfg.max_steps}"
        )
        row = summarize(OPT_POLICY, capacity, [math.nan]).row(workload.independent_cost, status="timeout")
        row["trials"] = 0
        return row
    result = solve_exact(instance, opt_cfg.time_limit, opt_cfg.max_states)
    summary = summarize(OPT_POLICY, capacity, [result.optimal_cost])
    return summary.row(workload.independent_cost, status="ok" if result.proved_optimal else "timeout")


def _run_task(task: SweepTask, workload: Workload, trials: int, seed: int, opt_cfg) -> dict:
    if task.policy == OPT_POLICY:
        return _opt_row(workload, task.capacity, opt_cfg)
    factory = functools.partial(make_policy, task.policy)
    summary = run_trials(workload.plan, workload.dag, factory, task.capacity, trials, seed)
    return summary.row(workload.independent_cost)


def sweep(
    workload: Workload,
    policies: Sequence[str],
    capacities: Sequence[float],
    trials: int,
    seed: int,
    opt_cfg,
    num_workers: int = 1,
) -> List[dict]:
    """One summary row per (capacity, policy), ordered by capacity then policy list."""
    policies = [str(p).upper() for p in policies]
    if not policies:
        raise ConfigurationError("Select at least one policy or OPT")
    for policy in policies:
        if policy != OPT_POLICY:
            make_policy(policy)
    opt_cfg = OmegaConf.create(OmegaConf.to_container(opt_cfg, resolve=True))
    run = functools.partial(_run_task, workload=workload, trials=trials, seed=seed, opt_cfg=opt_cfg)

    rows: List[dict] = []
    metric_logger = MetricLogger(delimiter="  ")
    for capacity in metric_logger.log_every(list(capacities), 1, header=f"sweep {workload.name}"):
        capacity_rows = map_ordered(run, [SweepTask(policy, capacity) for policy in policies], num_workers)
        speedups = {row["policy"]: row["speedup_vs_independent"] for row in capacity_rows}
        finite = [value for value in speedups.values() if not math.isnan(value)]
        metric_logger.update(**speedups, best_speedup=max(finite) if finite else math.nan)
        rows.extend(capacity_rows)
    return rows


def write_rows(rows: Sequence[dict], output_dir: str, name: str, fmt: str = "csv") -> str:
    os.makedirs(output_dir, exist_ok=True)
    if fmt == "csv":
        path = os.path.join(output_dir, f"{name}.csv")
        write_summary_csv(rows, path)
    elif fmt == "json":
        path = os.path.join(output_dir, f"{name}.json")
        summary_frame(rows).to_json(path, orient="records", indent=2)
    else:
        raise ConfigurationError(f'Unsupported output format "{fmt}"')
    return path


def log_rows_to_wandb(rows: Sequence[dict], key: str) -> None:
    import wandb

    wandb.log({key: wandb.Table(dataframe=summary_frame(rows))})


def merge_summary(workload: Workload) -> Dict[str, object]:
    unmerged, merged = node_counts(workload.pipelines)
    merged_cost = total_cost_merged(workload.dag)
    report = {
        "workload": workload.name,
        "pipelines": len(workload.pipelines),
        "unmerged_nodes": unmerged,
        "merged_nodes": merged,
        "independent_cost": workload.independent_cost,
        "merged_cost": merged_cost,
        "speedup": speedup_ratio(workload.independent_cost, merged_cost),
        "duplicate_pipelines": workload.dag.duplicate_pipelines,
        "level_sizes": level_sizes(workload.dag),
    }
    lengths = {len(p) for p in workload.pipelines}
    costs = {node.cost for node in workload.dag.operator_nodes()}
    if len(lengths) == 1 and costs == {1.0}:
        bound = max_speedup_uniform(lengths.pop(), len(workload.pipelines))
        report["max_speedup_uniform"] = float(bound)
    return report


@dataclass
class SHRun:
    params: SHParams
    result: SHResult
    generations: List[Dag]
    workload: Workload


def sh_workload(cfg, workload: Workload) -> SHRun:
    """Run SH with a synthetic oracle and build the concatenated generation workload.

    Speedups of the returned workload are measured against independent
    evaluation of every unpruned pipeline at full resource.
    """
    params = SHParams(n=cfg.sh.n, R=float(cfg.sh.R), eta=cfg.sh.eta, G=cfg.sh.G)
    if params.n != len(workload.pipelines):
        raise ConfigurationError(
            f"SH population n={params.n} does not match the {len(workload.pipelines)} pipelines of {workload.name}"
        )
    oracle = SyntheticOracle(params.n, seed=cfg.seed, noise=float(cfg.sh.noise))
    result = successive_halving(list(range(params.n)), params, oracle, seed=cfg.seed, num_workers=cfg.num_workers)

    sinks = [workload.dag.path_of(pipeline)[-1] for pipeline in workload.pipelines]
    survivors = [sorted({sinks[index] for index in generation}) for generation in result.survivors_per_generation()]
    generations = sh_subdags(workload.dag, survivors, params, TrainingMode(cfg.sh.mode))
    union, plan = concat_generations(generations)

    budget = sh_budget(params)
    logger.info(
        f"training budget: SH {budget.sh / params.R:g}R (warm {budget.warm / params.R:g}R) "
        f"vs {budget.full / params.R:g}R without early stopping, ratio {budget.ratio:.3f}"
    )
    name = f"{workload.name}_sh_eta{params.eta}_G{params.G}"
    sh = Workload(name, union, workload.pipelines, plan, baseline=workload.independent_cost)
    return SHRun(params, result, generations, sh)
