# This source code is licensed under the Apache License, Version 2.0
# found in the LICENSE file in the root directory of this source tree.

import argparse
import logging
import sys

from pipereuse.errors import PipeReuseError
from pipereuse.run import gen_tree, merge_report, opt, sample, sh, simulate

logger = logging.getLogger("pipereuse")

COMMANDS = {
    "merge-report": merge_report,
    "simulate": simulate,
    "sh": sh,
    "opt": opt,
    "sample": sample,
    "gen-tree": gen_tree,
}


def get_args_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser("pipereuse", description="Pipeline-aware hyperparameter tuning experiments")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, module in COMMANDS.items():
        command_parser = module.get_args_parser(add_help=False)
        subparsers.add_parser(name, parents=[command_parser], description=command_parser.description)
    return parser


def main(argv=None):
    args = get_args_parser().parse_args(argv)
    try:
        return COMMANDS[args.command].main(args)
    except PipeReuseError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
