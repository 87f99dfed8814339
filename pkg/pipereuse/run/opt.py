# This source code is licensed under the Apache License, Version 2.0
# found in the LICENSE file in the root directory of this source tree.

import json
import logging
import math
import os
import sys

from pipereuse.errors import ConfigurationError, ContractViolation
from pipereuse.experiments import resolve_capacities, resolve_workload
from pipereuse.opt import build_instance, export_milp, solve_exact, validate_delta
from pipereuse.run.common import get_args_parser as get_common_args_parser
from pipereuse.utils.config import setup

logger = logging.getLogger("pipereuse")


def get_args_parser(add_help: bool = True):
    return get_common_args_parser(description="Optimal cache schedule of a workload", add_help=add_help)


def solve_capacity(cfg, workload, capacity: float) -> dict:
    instance = build_instance(workload.dag, workload.plan, capacity)
    time_limit, max_states = cfg.opt.time_limit, cfg.opt.max_states
    if not cfg.opt.force and (instance.n > cfg.opt.max_nodes or instance.T > cfg.opt.max_steps):
        if time_limit is None and max_states is None:
            raise ConfigurationError(
                f"Instance with n={instance.n}, T={instance.T} exceeds n<={cfg.opt.max_nodes}, "
                f"T<={cfg.opt.max_steps}; set opt.max_states, opt.time_limit or opt.force=true"
            )
        logger.warning(f"instance beyond the size guardrail, solving within {max_states} states / {time_limit}s")

    result = solve_exact(instance, time_limit, max_states)
    validation = validate_delta(instance, result.schedule)
    if not validation.feasible or not math.isclose(validation.cost, result.optimal_cost, rel_tol=1e-9, abs_tol=1e-9):
        raise ContractViolation(f"Schedule at capacity {capacity:g} does not replay: {validation.violations}")

    if cfg.opt.export_lp:
        path = os.path.join(cfg.output.dir, f"opt_c{capacity:g}.lp")
        with open(path, "w") as f:
            f.write(export_milp(instance, name=f"{workload.name}_c{capacity:g}"))
        logger.info(f"exported program to {path}")

    return {"capacity": capacity, **result.to_dict()}


def main(args):
    cfg = setup(args)
    workload = resolve_workload(cfg)
    capacities = resolve_capacities(cfg, workload)
    results = [solve_capacity(cfg, workload, capacity) for capacity in capacities]
    report = {
        "workload": workload.name,
        "nodes": len(workload.plan.node_ids()),
        "steps": workload.plan.T,
        "independent_cost": workload.independent_cost,
        "results": results,
    }
    path = os.path.join(cfg.output.dir, "opt.json")
    with open(path, "w") as f:
        json.dump(report, f, indent=2)
    logger.info(f"optimal costs {[r['optimal_cost'] for r in results]} written to {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main(get_args_parser(add_help=True).parse_args()))
