# This source code is licensed under the Apache License, Version 2.0
# found in the LICENSE file in the root directory of this source tree.

from typing import Dict

from pipereuse.configs import list_spaces, space_path
from pipereuse.errors import ConfigurationError
from pipereuse.search import SearchSpace, load_space


def builtin_space(name: str) -> SearchSpace:
    if name not in list_spaces():
        raise ConfigurationError(f'Unknown builtin space "{name}", choose from {list_spaces()}')
    return load_space(space_path(name))


def builtin_spaces() -> Dict[str, SearchSpace]:
    return {name: builtin_space(name) for name in list_spaces()}
