# This source code is licensed under the Apache License, Version 2.0
# found in the LICENSE file in the root directory of this source tree.

import argparse
from typing import List, Optional


def get_args_parser(
    description: Optional[str] = None,
    parents: Optional[List[argparse.ArgumentParser]] = None,
    add_help: bool = True,
) -> argparse.ArgumentParser:
    """Flags shared by every subcommand; each maps onto a config key."""
    parents = parents or []
    parser = argparse.ArgumentParser(
        description=description,
        parents=parents,
        add_help=add_help,
    )
    parser.add_argument("--config-file", default="", metavar="FILE", help="path to config file")
    parser.add_argument(
        "--workload",
        type=str,
        help="tree | profile | space | toy | disjoint, a tree preset (costly_root, mixed_costs) or a profile .json",
    )
    parser.add_argument("--space", type=str, help="Builtin search space name or a search-space file")
    parser.add_argument("--sampler", type=str, choices=["random", "grid", "gridded_random"], help="Sampler")
    parser.add_argument("--branching", type=str, help="Gridded random branching factors, e.g. 4,5,5")
    parser.add_argument("--n", type=int, help="Number of random configurations")
    parser.add_argument("--policies", type=str, help="Comma-separated policies, e.g. LRU,WRECIPROCAL,OPT")
    parser.add_argument("--capacities", type=str, help="Comma-separated capacities or geom:start:stop:num")
    parser.add_argument("--trials", type=int, help="Simulations per policy and capacity")
    parser.add_argument("--seed", type=int, help="Base random seed")
    parser.add_argument("--sh", type=str, metavar="n,R,eta,G", help="Successive Halving parameters")
    parser.add_argument("--out", type=str, help="Output directory")
    parser.add_argument("--format", type=str, choices=["csv", "json"], help="Summary format")
    parser.add_argument("--time-limit", type=float, help="Time limit of the exact solver in seconds")
    parser.add_argument("--max-states", type=int, help="States the exact solver expands before giving up")
    parser.add_argument("--num-workers", type=int, help="Worker processes for sweep points")
    parser.add_argument(
        "opts",
        help="""
Modify config options at the end of the command using "path.key=value".
        """.strip(),
        default=None,
        nargs=argparse.REMAINDER,
    )
    return parser
