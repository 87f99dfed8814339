# This source code is licensed under the Apache License, Version 2.0
# found in the LICENSE file in the root directory of this source tree.

import json
import logging
import os
import sys

from pipereuse.experiments import merge_summary, resolve_workload
from pipereuse.run.common import get_args_parser as get_common_args_parser
from pipereuse.utils.config import setup

logger = logging.getLogger("pipereuse")


def get_args_parser(add_help: bool = True):
    return get_common_args_parser(description="Merge report of a workload", add_help=add_help)


def main(args):
    cfg = setup(args)
    report = merge_summary(resolve_workload(cfg))
    text = json.dumps(report, indent=2)
    print(text)
    path = os.path.join(cfg.output.dir, "merge_report.json")
    with open(path, "w") as f:
        f.write(text + "\n")
    logger.info(f"speedup from merging: {report['speedup']:.4f}, report written to {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main(get_args_parser(add_help=True).parse_args()))
