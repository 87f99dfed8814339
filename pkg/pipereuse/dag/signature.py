# This source code is licensed under the Apache License, Version 2.0
# found in the LICENSE file in the root directory of this source tree.

import json
from dataclasses import dataclass, field
from typing import Any, Mapping, Tuple, Union

import numpy as np

Scalar = Union[bool, int, float, str]


def canonical_value(value: Any) -> str:
    """Render a parameter value so that equal renderings mean equal computations.

    Floats use ``repr`` which round-trips exactly; labels are quoted so that the
    label "10" never collides with the integer 10.
    """
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, str):
        return json.dumps(value)
    raise TypeError(f"Unsupported parameter value {value!r} of type {type(value).__name__}")


def to_scalar(value: Any) -> Scalar:
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    if isinstance(value, str):
        return value
    raise TypeError(f"Unsupported parameter value {value!r} of type {type(value).__name__}")


@dataclass(frozen=True, eq=False)
class OpSignature:
    """An operator together with its hyperparameter assignment."""

    operator_name: str
    params: Tuple[Tuple[str, Scalar], ...] = ()
    _key: Tuple[str, Tuple[Tuple[str, str], ...]] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        names = [name for name, _ in self.params]
        if len(set(names)) != len(names):
            raise ValueError(f"Duplicate parameter names in signature of {self.operator_name}: {names}")
        params = tuple((str(name), to_scalar(value)) for name, value in self.params)
        object.__setattr__(self, "params", params)
        key = tuple(sorted((name, canonical_value(value)) for name, value in params))
        object.__setattr__(self, "_key", (self.operator_name, key))

    @classmethod
    def create(cls, operator_name: str, params: Mapping[str, Any] = None) -> "OpSignature":
        return cls(operator_name, tuple((params or {}).items()))

    @property
    def canonical(self) -> str:
        rendered = ",".join(f"{name}={value}" for name, value in self._key[1])
        return f"{self.operator_name}({rendered})"

    def as_dict(self) -> dict:
        return dict(self.params)

    def __eq__(self, other):
        if not isinstance(other, OpSignature):
            return NotImplemented
        return self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __lt__(self, other: "OpSignature") -> bool:
        return self.canonical < other.canonical

    def __str__(self):
        return self.canonical
