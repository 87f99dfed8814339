# This source code is licensed under the Apache License, Version 2.0
# found in the LICENSE file in the root directory of this source tree.

import json
import logging
import os
import sys

from omegaconf import OmegaConf

from pipereuse.errors import ConfigurationError
from pipereuse.experiments import resolve_workload
from pipereuse.run.common import get_args_parser as get_common_args_parser
from pipereuse.utils.config import setup

logger = logging.getLogger("pipereuse")


def get_args_parser(add_help: bool = True):
    return get_common_args_parser(description="Sample pipeline configurations from a search space", add_help=add_help)


def main(args):
    cfg = setup(args)
    if cfg.workload.source != "space":
        raise ConfigurationError(f"sample needs a search space workload, got {cfg.workload.source}")
    workload = resolve_workload(cfg)
    configurations = [
        [{"operator": signature.operator_name, "params": signature.as_dict()} for signature in pipeline]
        for pipeline in workload.pipelines
    ]
    document = {
        "space": cfg.workload.space,
        "sampler": cfg.workload.sampler,
        "seed": cfg.seed,
        "branching": OmegaConf.to_container(cfg.workload.branching) if cfg.workload.branching is not None else None,
        "configurations": configurations,
    }
    path = os.path.join(cfg.output.dir, "samples.json")
    with open(path, "w") as f:
        json.dump(document, f, indent=2)
    logger.info(f"wrote {len(configurations)} configurations ({len(workload.dag) - 1} merged nodes) to {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main(get_args_parser(add_help=True).parse_args()))
