# This source code is licensed under the Apache License, Version 2.0
# found in the LICENSE file in the root directory of this source tree.

import logging
import os
import sys

from pipereuse.cache import make_policy, simulate, trial_seeds
from pipereuse.experiments import (
    OPT_POLICY,
    Workload,
    log_rows_to_wandb,
    resolve_capacities,
    resolve_workload,
    sweep,
    write_rows,
)
from pipereuse.run.common import get_args_parser as get_common_args_parser
from pipereuse.utils.config import setup

logger = logging.getLogger("pipereuse")


def get_args_parser(add_help: bool = True):
    return get_common_args_parser(description="Simulate cache policies over a capacity sweep", add_help=add_help)


def write_traces(cfg, workload: Workload, capacities) -> None:
    """Trace of the first trial of every online policy at every capacity."""
    trace_dir = os.path.join(cfg.output.dir, "traces")
    os.makedirs(trace_dir, exist_ok=True)
    seed = trial_seeds(cfg.seed, 1)[0]
    for policy_name in cfg.policies:
        if str(policy_name).upper() == OPT_POLICY:
            continue
        for capacity in capacities:
            result = simulate(workload.plan, workload.dag, make_policy(policy_name, seed), capacity, seed)
            result.write_trace(os.path.join(trace_dir, f"{result.policy}_c{capacity:g}.jsonl"))


def run_sweep(cfg, workload: Workload, capacities, name: str) -> str:
    rows = sweep(
        workload,
        list(cfg.policies),
        capacities,
        cfg.trials,
        cfg.seed,
        cfg.opt,
        num_workers=cfg.num_workers,
    )
    path = write_rows(rows, cfg.output.dir, name, cfg.output.format)
    if cfg.output.trace:
        write_traces(cfg, workload, capacities)
    if cfg.logging.wandb:
        log_rows_to_wandb(rows, name)
    return path


def main(args):
    cfg = setup(args)
    workload = resolve_workload(cfg)
    capacities = resolve_capacities(cfg, workload)
    logger.info(
        f"workload {workload.name}: {len(workload.dag)} nodes, {workload.plan.T} steps, "
        f"independent cost {workload.independent_cost:g}, capacities {capacities}"
    )
    path = run_sweep(cfg, workload, capacities, "simulate")
    logger.info(f"summary written to {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main(get_args_parser(add_help=True).parse_args()))
