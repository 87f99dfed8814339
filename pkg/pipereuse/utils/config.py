# This source code is licensed under the Apache License, Version 2.0
# found in the LICENSE file in the root directory of this source tree.

import logging
import os

from omegaconf import OmegaConf

from pipereuse.configs import pipereuse_default_config
from pipereuse.errors import ConfigurationError
from pipereuse.logging import setup_logging
from pipereuse.utils import utils

logger = logging.getLogger("pipereuse")

WORKLOAD_SOURCES = ("tree", "profile", "space", "toy", "disjoint")
TREE_PRESETS = {
    "costly_root": {"k": 3, "d": 3, "cost_model": "root_heavy", "cost": 1.0, "root_cost": 100.0, "size": 10.0},
    "mixed_costs": {
        "k": 3,
        "d": 3,
        "cost_model": "two_point",
        "size_model": "two_point",
        "cost_lo": 1.0,
        "cost_hi": 100.0,
        "size_lo": 10.0,
        "size_hi": 50.0,
        "coupled": True,
    },
}


def write_config(cfg, output_dir, name="config.yaml"):
    logger.info(OmegaConf.to_yaml(cfg))
    saved_cfg_path = os.path.join(output_dir, name)
    with open(saved_cfg_path, "w") as f:
        OmegaConf.save(config=cfg, f=f)
    return saved_cfg_path


def _split(text):
    return [token.strip() for token in str(text).split(",") if token.strip()]


def _parse_capacities(text):
    """``"0,10,20"`` or ``"geom:start:stop:num"``."""
    if str(text).startswith("geom:"):
        try:
            _, start, stop, num = str(text).split(":")
            return {"values": None, "start": float(start), "stop": float(stop), "num": int(num)}
        except ValueError:
            raise ConfigurationError(f"Cannot parse capacity range {text!r}, expected geom:start:stop:num") from None
    try:
        return {"values": [float(v) for v in _split(text)]}
    except ValueError:
        raise ConfigurationError(f"Cannot parse capacities {text!r}") from None


def args_to_cfg(args):
    """Dedicated command-line flags as a config fragment."""
    overrides = {}

    def put(path, value):
        node = overrides
        keys = path.split(".")
        for key in keys[:-1]:
            node = node.setdefault(key, {})
        node[keys[-1]] = value

    workload = getattr(args, "workload", None)
    if workload:
        if workload in TREE_PRESETS:
            put("workload.source", "tree")
            put("workload.tree", dict(TREE_PRESETS[workload]))
        elif workload.endswith(".json"):
            put("workload.source", "profile")
            put("workload.profile", workload)
        elif workload in WORKLOAD_SOURCES:
            put("workload.source", workload)
        else:
            raise ConfigurationError(
                f'Unknown workload "{workload}", use one of {list(WORKLOAD_SOURCES) + list(TREE_PRESETS)} '
                "or a profile .json file"
            )
    if getattr(args, "space", None):
        put("workload.space", args.space)
        if not workload:
            put("workload.source", "space")
    if getattr(args, "sampler", None):
        put("workload.sampler", args.sampler)
    if getattr(args, "branching", None):
        try:
            put("workload.branching", [int(v) for v in _split(args.branching)])
        except ValueError:
            raise ConfigurationError(f"Cannot parse branching {args.branching!r}") from None
    if getattr(args, "n", None) is not None:
        put("workload.n", args.n)
    if getattr(args, "policies", None):
        put("policies", [p.upper() for p in _split(args.policies)])
    if getattr(args, "capacities", None):
        for key, value in _parse_capacities(args.capacities).items():
            put(f"capacities.{key}", value)
    if getattr(args, "trials", None) is not None:
        put("trials", args.trials)
    if getattr(args, "seed", None) is not None:
        put("seed", args.seed)
    if getattr(args, "sh", None):
        tokens = _split(args.sh)
        if len(tokens) != 4:
            raise ConfigurationError(f"--sh expects n,R,eta,G but got {args.sh!r}")
        try:
            put("sh.n", int(tokens[0]))
            put("sh.R", float(tokens[1]))
            put("sh.eta", int(tokens[2]))
            put("sh.G", int(tokens[3]))
        except ValueError:
            raise ConfigurationError(f"Cannot parse --sh {args.sh!r}") from None
    if getattr(args, "out", None):
        put("output.dir", args.out)
    if getattr(args, "format", None):
        put("output.format", args.format)
    if getattr(args, "time_limit", None) is not None:
        put("opt.time_limit", args.time_limit)
    if getattr(args, "max_states", None) is not None:
        put("opt.max_states", args.max_states)
    if getattr(args, "num_workers", None) is not None:
        put("num_workers", args.num_workers)
    return OmegaConf.create(overrides)


def get_cfg_from_args(args):
    default_cfg = OmegaConf.create(pipereuse_default_config)
    configs = [default_cfg]
    config_file = getattr(args, "config_file", "")
    if config_file:
        if not os.path.exists(config_file):
            raise ConfigurationError(f"Configuration file {config_file} does not exist")
        configs.append(OmegaConf.load(config_file))
    configs.append(args_to_cfg(args))
    configs.append(OmegaConf.from_cli(list(getattr(args, "opts", None) or [])))
    return OmegaConf.merge(*configs)


def default_setup(args, cfg):
    output = cfg.output.dir if cfg.logging.file else None
    setup_logging(
        output=output,
        level=str(cfg.logging.level),
        use_wandb=bool(cfg.logging.wandb),
        run_name=cfg.logging.run_name,
        config=OmegaConf.to_container(cfg, resolve=True),
    )
    logger.info("git:\n  {}\n".format(utils.get_sha()))
    logger.info("\n".join("%s: %s" % (k, str(v)) for k, v in sorted(dict(vars(args)).items())))


def setup(args):
    """
    Create the config, the output directory and the loggers.
    """
    cfg = get_cfg_from_args(args)
    os.makedirs(cfg.output.dir, exist_ok=True)
    default_setup(args, cfg)
    write_config(cfg, cfg.output.dir)
    return cfg
