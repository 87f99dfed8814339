# This source code is licensed under the Apache License, Version 2.0
# found in the LICENSE file in the root directory of this source tree.

import json
import logging
import os
import sys
from dataclasses import asdict

from pipereuse.early_stopping import generation_allocations, sh_budget
from pipereuse.experiments import SHRun, resolve_capacities, resolve_workload, sh_workload
from pipereuse.run.common import get_args_parser as get_common_args_parser
from pipereuse.run.simulate import run_sweep
from pipereuse.utils.config import setup
from pipereuse.workloads import save_profile

logger = logging.getLogger("pipereuse")


def get_args_parser(add_help: bool = True):
    return get_common_args_parser(description="Cache simulation of a Successive Halving schedule", add_help=add_help)


def write_sh_outputs(run: SHRun, output_dir: str) -> str:
    params = run.params
    budget = sh_budget(params)
    summary = {
        "params": asdict(params),
        "budget": {
            "sh": budget.sh,
            "warm": budget.warm,
            "full": budget.full,
            "ratio": budget.ratio,
            "line": f"{budget.sh / params.R:g}R vs {budget.full / params.R:g}R",
        },
        "allocations": [asdict(a) for a in generation_allocations(params)],
        "winner": run.result.winner,
        "history": [record.to_dict() for record in run.result.history],
        "diagnostics": run.result.diagnostics,
    }
    path = os.path.join(output_dir, "sh_budget.json")
    with open(path, "w") as f:
        json.dump(summary, f, indent=2)

    generation_dir = os.path.join(output_dir, "generations")
    os.makedirs(generation_dir, exist_ok=True)
    for g, dag in enumerate(run.generations, start=1):
        save_profile(dag, os.path.join(generation_dir, f"generation_{g}.json"), metadata={"generation": g})
    return path


def main(args):
    cfg = setup(args)
    workload = resolve_workload(cfg)
    capacities = resolve_capacities(cfg, workload)
    run = sh_workload(cfg, workload)
    logger.info(
        f"SH workload {run.workload.name}: {run.workload.plan.T} steps, "
        f"plan cost {sum(run.workload.dag.node(i).cost for i in run.workload.plan.sequence):g}, "
        f"unpruned independent cost {run.workload.independent_cost:g}"
    )
    write_sh_outputs(run, cfg.output.dir)
    path = run_sweep(cfg, run.workload, capacities, "sh")
    logger.info(f"summary written to {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main(get_args_parser(add_help=True).parse_args()))
