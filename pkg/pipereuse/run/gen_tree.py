# This source code is licensed under the Apache License, Version 2.0
# found in the LICENSE file in the root directory of this source tree.

import logging
import os
import sys

from omegaconf import OmegaConf

from pipereuse.errors import ConfigurationError
from pipereuse.experiments import resolve_workload
from pipereuse.run.common import get_args_parser as get_common_args_parser
from pipereuse.utils.config import setup
from pipereuse.workloads import save_profile

logger = logging.getLogger("pipereuse")


def get_args_parser(add_help: bool = True):
    return get_common_args_parser(description="Write a generated k-ary tree as a profile", add_help=add_help)


def main(args):
    cfg = setup(args)
    if cfg.workload.source != "tree":
        raise ConfigurationError(f"gen-tree needs a tree workload, got {cfg.workload.source}")
    workload = resolve_workload(cfg)
    metadata = {"generator": OmegaConf.to_container(cfg.workload.tree, resolve=True), "seed": cfg.seed}
    save_profile(workload.dag, os.path.join(cfg.output.dir, f"{workload.name}.json"), metadata=metadata)
    return 0


if __name__ == "__main__":
    sys.exit(main(get_args_parser(add_help=True).parse_args()))
