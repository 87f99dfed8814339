# This source code is licensed under the Apache License, Version 2.0
# found in the LICENSE file in the root directory of this source tree.

import pathlib
from typing import List

from omegaconf import OmegaConf

_CONFIG_DIR = pathlib.Path(__file__).parent.resolve()
_SPACES_DIR = _CONFIG_DIR / "spaces"


def load_config(config_name: str):
    config_filename = config_name + ".yaml"
    return OmegaConf.load(_CONFIG_DIR / config_filename)


pipereuse_default_config = load_config("default_config")


def list_spaces() -> List[str]:
    return sorted(path.stem for path in _SPACES_DIR.glob("*.yaml"))


def space_path(name: str) -> str:
    return str(_SPACES_DIR / f"{name}.yaml")
